#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lht/dataset.hpp"

namespace lht {

/// A set of dataset rows under a binary target/non-target labelling.
/// `rows` and `is_target` are parallel; row ids are unique.
struct Block {
  std::vector<std::uint32_t> rows;
  std::vector<std::uint8_t> is_target;

  std::size_t size() const { return rows.size(); }
  bool has_both_classes() const;
  bool is_pure() const;
};

/// Normalized per-feature hyperplane weights for one branching node.
/// `weights` has one entry per dataset feature, zero for unselected features;
/// `sd` holds the class-mean differences the weights were derived from.
struct FeatureWeights {
  std::vector<double> weights;
  std::vector<std::size_t> selected;
  std::vector<double> sd;
  double sd_max = 0.0;

  bool empty() const { return selected.empty(); }
};

enum class SplitCase { N1, N2, N3, N4, FallbackE };

std::string to_string(SplitCase c);
SplitCase split_case_from_string(const std::string& s);

/// One oblique split: route left when the weighted feature sum falls below
/// the threshold (or at it, when `left_inclusive`). The inclusive flag stands
/// in for the infinitesimal offset added to max-side cut points, giving the
/// boundary semantics exactly instead of via a floating epsilon.
struct SplitPlan {
  FeatureWeights weights;
  double threshold = 0.0;
  bool left_inclusive = false;
  SplitCase chosen_case = SplitCase::FallbackE;

  bool routes_left(double fs) const {
    return left_inclusive ? fs <= threshold : fs < threshold;
  }
};

/// Extremes of the per-class weighted-sum distributions plus the candidate
/// pure-side counts n1..n4 and the fallback centre e.
struct FsSummary {
  double min_tfs = 0.0;
  double max_tfs = 0.0;
  double min_nfs = 0.0;
  double max_nfs = 0.0;
  double e = 0.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t n3 = 0;
  std::size_t n4 = 0;
};

struct ThresholdChoice {
  double threshold = 0.0;
  bool left_inclusive = false;
  SplitCase chosen_case = SplitCase::FallbackE;
};

/// Features whose population variance over the block's rows strictly exceeds
/// `alpha`. May be empty.
std::vector<std::size_t> variance_filter(const Block& block, const Dataset& data, double alpha);

struct SeparationDegrees {
  std::vector<double> sd;  // per feature; zero for features outside the filter
  double sd_max = 0.0;     // max |sd| over the filtered features
};

/// Per-feature difference between target and non-target means over the block.
SeparationDegrees separation_degrees(const Block& block, const Dataset& data,
                                     const std::vector<std::size_t>& features);

/// Normalizes sd by sd_max and keeps features with |w| >= beta. A zero sd_max
/// yields an empty selection: there is no discriminative direction.
FeatureWeights compute_weights(const std::vector<double>& sd, double sd_max, double beta);

/// Weighted feature sum over the selected features.
double feature_sum(std::span<const double> x, const FeatureWeights& weights);

/// Weighted feature sums for every row of the block, in block order.
std::vector<double> feature_sums(const Block& block, const Dataset& data,
                                 const FeatureWeights& weights);

FsSummary summarize_fs(const Block& block, const Dataset& data, const FeatureWeights& weights);

/// Same summary computed from already-evaluated sums (parallel to the block's
/// rows), so builders can reuse one evaluation per node.
FsSummary summarize_fs_values(std::span<const double> fs,
                              std::span<const std::uint8_t> is_target);

/// Threshold selection: the candidate cut with the largest pure-sample count
/// wins if that count reaches gamma (ties broken in order n1, n2, n3, n4);
/// otherwise the centre value e is used with a strict cut.
ThresholdChoice select_threshold(const FsSummary& summary, unsigned gamma);

/// Partitions the block by the plan. Throws if either side would be empty,
/// which is unreachable for plans built from this block under the splitting
/// assumptions (both classes present, weighted sums not all equal).
std::pair<Block, Block> apply_split(const Block& block, const Dataset& data,
                                    const SplitPlan& plan);

/// Partition from already-evaluated sums.
std::pair<Block, Block> apply_split_values(const Block& block, std::span<const double> fs,
                                           const SplitPlan& plan);

}  // namespace lht

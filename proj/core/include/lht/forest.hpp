#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lht/dataset.hpp"
#include "lht/tree.hpp"

namespace lht {

/// Ensemble configuration: `trees_per_class` trees are grown per class, tree i
/// trained with beta from the schedule beta' * i / t (plain beta' when t = 1)
/// on a row subsample of `forest_rate`, optionally restricted to a random
/// feature subset of `feature_fraction`.
struct ForestParams {
  unsigned trees_per_class = 1;
  double beta_prime = 0.0;
  double forest_rate = 1.0;
  TreeParams base;  // alpha, gamma, min_samples, max_depth; beta comes from the schedule
  std::uint64_t seed = 0;
  std::optional<double> feature_fraction;
};

/// Selection threshold for tree `index` of a class under `params`.
double schedule_beta(const ForestParams& params, unsigned index);

/// Seed for tree `index` of class `c`, derived from the master seed by stream
/// position c * trees_per_class + index.
std::uint64_t tree_seed(const ForestParams& params, int c, unsigned index);

/// Per-class tree ensembles plus everything needed to score raw inputs:
/// the training normalizer (absent when normalization was disabled) and the
/// class-label mapping. Immutable once built.
class LhForest {
 public:
  LhForest(std::vector<std::vector<LhTree>> trees, std::vector<std::string> class_names,
           std::optional<NormalizationStats> normalizer, ForestParams params,
           std::size_t n_features);

  std::size_t class_count() const { return trees_.size(); }
  unsigned trees_per_class() const { return params_.trees_per_class; }
  std::size_t feature_count() const { return n_features_; }
  const std::vector<std::vector<LhTree>>& trees() const { return trees_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const std::optional<NormalizationStats>& normalizer() const { return normalizer_; }
  const ForestParams& params() const { return params_; }

  std::string class_name(int c) const;

 private:
  std::vector<std::vector<LhTree>> trees_;  // [class][tree index]
  std::vector<std::string> class_names_;
  std::optional<NormalizationStats> normalizer_;
  ForestParams params_;
  std::size_t n_features_ = 0;
};

struct ClassScores {
  std::vector<double> scores;  // one per class, each in [0,1]
  int predicted = 0;           // smallest-index arg max
  double margin = 0.0;         // top score minus runner-up
};

/// Trains one ensemble per class. With `normalize`, min-max stats are fitted
/// on `train` and stored in the forest; trees are grown on the scaled data.
/// Fully deterministic for fixed (data, params): every tree draws its row and
/// feature subsets from its own derived seed, so `threads` only controls how
/// the independent builds are executed.
LhForest train_forest(const Dataset& train, const ForestParams& params, bool normalize = true,
                      unsigned threads = 1);

struct TreeTiming {
  int class_id = 0;
  unsigned tree_index = 0;
  double seconds = 0.0;
};

/// Sequential training that records the wall time of each tree build.
LhForest train_forest_timed(const Dataset& train, const ForestParams& params, bool normalize,
                            std::vector<TreeTiming>& timings);

/// Scores one raw input row: scales it with the stored normalizer, averages
/// membership over each class's trees, and picks the arg-max class.
ClassScores score(const LhForest& forest, std::span<const double> x);

std::vector<ClassScores> predict_batch(const LhForest& forest, const Dataset& data);
std::vector<ClassScores> predict_batch(const LhForest& forest, const FeatureMatrix& data);

struct Evaluation {
  double accuracy = 0.0;
  std::vector<std::vector<std::size_t>> confusion;  // [actual][predicted]
};

Evaluation evaluate(const LhForest& forest, const Dataset& test);

}  // namespace lht

#include "lht/split_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lht {

bool Block::has_both_classes() const {
  if (is_target.empty()) return false;
  const std::uint8_t first = is_target.front();
  return std::any_of(is_target.begin(), is_target.end(),
                     [first](std::uint8_t f) { return f != first; });
}

bool Block::is_pure() const { return !has_both_classes(); }

std::string to_string(SplitCase c) {
  switch (c) {
    case SplitCase::N1: return "N1";
    case SplitCase::N2: return "N2";
    case SplitCase::N3: return "N3";
    case SplitCase::N4: return "N4";
    case SplitCase::FallbackE: return "FALLBACK_E";
  }
  throw std::logic_error("unknown split case");
}

SplitCase split_case_from_string(const std::string& s) {
  if (s == "N1") return SplitCase::N1;
  if (s == "N2") return SplitCase::N2;
  if (s == "N3") return SplitCase::N3;
  if (s == "N4") return SplitCase::N4;
  if (s == "FALLBACK_E") return SplitCase::FallbackE;
  throw std::runtime_error("unknown split case tag: '" + s + "'");
}

std::vector<std::size_t> variance_filter(const Block& block, const Dataset& data, double alpha) {
  if (block.size() == 0) throw std::invalid_argument("variance filter needs a non-empty block");
  const std::size_t m = data.cols();
  const double n = static_cast<double>(block.size());

  std::vector<std::size_t> kept;
  for (std::size_t f = 0; f < m; ++f) {
    double lo = data.at(block.rows.front(), f);
    double hi = lo;
    double sum = 0.0;
    for (std::uint32_t r : block.rows) {
      const double v = data.at(r, f);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    if (lo == hi) continue;  // population variance is exactly zero
    const double mean = sum / n;
    double sq = 0.0;
    for (std::uint32_t r : block.rows) {
      const double d = data.at(r, f) - mean;
      sq += d * d;
    }
    if (sq / n > alpha) kept.push_back(f);
  }
  return kept;
}

SeparationDegrees separation_degrees(const Block& block, const Dataset& data,
                                     const std::vector<std::size_t>& features) {
  if (!block.has_both_classes()) {
    throw std::invalid_argument("separation degrees need both classes in the block");
  }
  SeparationDegrees result;
  result.sd.assign(data.cols(), 0.0);

  std::size_t n_target = 0;
  for (std::uint8_t f : block.is_target) n_target += f;
  const std::size_t n_other = block.size() - n_target;

  for (std::size_t f : features) {
    double target_sum = 0.0;
    double other_sum = 0.0;
    for (std::size_t i = 0; i < block.size(); ++i) {
      const double v = data.at(block.rows[i], f);
      if (block.is_target[i]) {
        target_sum += v;
      } else {
        other_sum += v;
      }
    }
    const double sd = target_sum / static_cast<double>(n_target) -
                      other_sum / static_cast<double>(n_other);
    result.sd[f] = sd;
    result.sd_max = std::max(result.sd_max, std::abs(sd));
  }
  return result;
}

FeatureWeights compute_weights(const std::vector<double>& sd, double sd_max, double beta) {
  if (sd_max < 0.0) throw std::invalid_argument("sd_max must be non-negative");
  FeatureWeights weights;
  weights.sd = sd;
  weights.sd_max = sd_max;
  weights.weights.assign(sd.size(), 0.0);
  if (sd_max == 0.0) return weights;  // no discriminative direction

  for (std::size_t i = 0; i < sd.size(); ++i) {
    const double w = sd[i] / sd_max;
    if (std::abs(w) >= beta) {
      weights.weights[i] = w;
      weights.selected.push_back(i);
    }
  }
  return weights;
}

double feature_sum(std::span<const double> x, const FeatureWeights& weights) {
  if (x.size() != weights.weights.size()) {
    throw std::invalid_argument("feature_sum: vector has " + std::to_string(x.size()) +
                                " entries, weights have " +
                                std::to_string(weights.weights.size()));
  }
  double sum = 0.0;
  for (std::size_t i : weights.selected) sum += weights.weights[i] * x[i];
  return sum;
}

std::vector<double> feature_sums(const Block& block, const Dataset& data,
                                 const FeatureWeights& weights) {
  std::vector<double> sums(block.size());
  for (std::size_t i = 0; i < block.size(); ++i) {
    sums[i] = feature_sum(data.row(block.rows[i]), weights);
  }
  return sums;
}

FsSummary summarize_fs_values(std::span<const double> fs,
                              std::span<const std::uint8_t> is_target) {
  if (fs.size() != is_target.size()) {
    throw std::invalid_argument("summarize_fs_values: mismatched lengths");
  }
  FsSummary s;
  bool target_seen = false;
  bool other_seen = false;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (is_target[i]) {
      if (!target_seen) {
        s.min_tfs = s.max_tfs = fs[i];
        target_seen = true;
      } else {
        s.min_tfs = std::min(s.min_tfs, fs[i]);
        s.max_tfs = std::max(s.max_tfs, fs[i]);
      }
    } else {
      if (!other_seen) {
        s.min_nfs = s.max_nfs = fs[i];
        other_seen = true;
      } else {
        s.min_nfs = std::min(s.min_nfs, fs[i]);
        s.max_nfs = std::max(s.max_nfs, fs[i]);
      }
    }
  }
  if (!target_seen || !other_seen) {
    throw std::invalid_argument("summarize_fs_values needs both classes");
  }
  s.e = (s.min_nfs + s.max_nfs + s.min_tfs + s.max_tfs) / 4.0;

  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (is_target[i]) {
      if (fs[i] < s.min_nfs) ++s.n1;
      if (fs[i] > s.max_nfs) ++s.n2;
    } else {
      if (fs[i] < s.min_tfs) ++s.n3;
      if (fs[i] > s.max_tfs) ++s.n4;
    }
  }
  return s;
}

FsSummary summarize_fs(const Block& block, const Dataset& data, const FeatureWeights& weights) {
  const std::vector<double> fs = feature_sums(block, data, weights);
  return summarize_fs_values(fs, block.is_target);
}

ThresholdChoice select_threshold(const FsSummary& s, unsigned gamma) {
  if (gamma == 0) throw std::invalid_argument("gamma must be positive");
  const std::size_t n_max = std::max({s.n1, s.n2, s.n3, s.n4});
  if (n_max >= gamma) {
    // Ties resolve in candidate order; the two "max" candidates take the
    // boundary sample into the left side, standing in for cut + delta.
    if (s.n1 == n_max) return {s.min_nfs, false, SplitCase::N1};
    if (s.n2 == n_max) return {s.max_nfs, true, SplitCase::N2};
    if (s.n3 == n_max) return {s.min_tfs, false, SplitCase::N3};
    return {s.max_tfs, true, SplitCase::N4};
  }
  return {s.e, false, SplitCase::FallbackE};
}

std::pair<Block, Block> apply_split_values(const Block& block, std::span<const double> fs,
                                           const SplitPlan& plan) {
  if (fs.size() != block.size()) {
    throw std::invalid_argument("apply_split_values: mismatched lengths");
  }
  Block left;
  Block right;
  for (std::size_t i = 0; i < block.size(); ++i) {
    Block& side = plan.routes_left(fs[i]) ? left : right;
    side.rows.push_back(block.rows[i]);
    side.is_target.push_back(block.is_target[i]);
  }
  if (left.size() == 0 || right.size() == 0) {
    throw std::runtime_error("degenerate split: one side is empty (case " +
                             to_string(plan.chosen_case) + ", threshold " +
                             std::to_string(plan.threshold) + ")");
  }
  return {std::move(left), std::move(right)};
}

std::pair<Block, Block> apply_split(const Block& block, const Dataset& data,
                                    const SplitPlan& plan) {
  return apply_split_values(block, feature_sums(block, data, plan.weights), plan);
}

}  // namespace lht

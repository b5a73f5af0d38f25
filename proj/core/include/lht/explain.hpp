#pragma once

#include <string>
#include <vector>

#include "lht/forest.hpp"

namespace lht {

/// One branching node's hyperplane, addressed by class, tree, and the
/// left/right path from the root ("" for the root itself).
struct NodeWeightRecord {
  int class_id = 0;
  int tree_index = 0;
  std::string node_path;
  std::vector<double> weights;
  double threshold = 0.0;
  SplitCase chosen_case = SplitCase::FallbackE;
  std::size_t left_rows = 0;
  std::size_t right_rows = 0;
};

/// One record per branch node, ordered by (class, tree, preorder).
std::vector<NodeWeightRecord> extract_node_weights(const LhForest& forest);

enum class ImportanceWeighting { Uniform, ByNodeSize };

/// Per-feature aggregate of |w_i| over branch records, scaled to sum to one.
/// `empty` marks the all-zero summary produced by a record-free forest.
struct ImportanceSummary {
  std::vector<double> importance;
  bool empty = true;
};

ImportanceSummary importance_summary(const std::vector<NodeWeightRecord>& records,
                                     ImportanceWeighting weighting,
                                     std::size_t n_features);

}  // namespace lht

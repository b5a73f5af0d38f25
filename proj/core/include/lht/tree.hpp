#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "lht/dataset.hpp"
#include "lht/split_engine.hpp"

namespace lht {

struct TreeParams {
  double alpha = 0.0;        // variance filter threshold
  double beta = 0.0;         // weight selection threshold in [0,1]
  unsigned gamma = 2;        // minimum pure-side size for a purity cut
  unsigned min_samples = 2;  // below this a block becomes a leaf
  unsigned max_depth = 50;
};

/// Clipped linear membership model fitted in a leaf: independent per-feature
/// least-squares slopes with a mean-aligned intercept, evaluated in centred
/// form sum(a_i * (x_i - mean_i)) + label_mean and clipped to [0,1].
struct LeafModel {
  std::vector<double> slopes;
  std::vector<double> feature_means;
  double label_mean = 0.0;
  std::uint32_t sample_count = 0;

  /// Un-clipped linear prediction.
  double predict_raw(std::span<const double> x) const;
  /// Prediction clipped to [0,1].
  double predict(std::span<const double> x) const;
};

class TreeNode {
 public:
  struct Branch {
    SplitPlan plan;
    std::size_t left_rows = 0;   // training rows routed left
    std::size_t right_rows = 0;  // training rows routed right
    std::unique_ptr<TreeNode> left;
    std::unique_ptr<TreeNode> right;
  };

  explicit TreeNode(Branch branch) : node_(std::move(branch)) {}
  explicit TreeNode(LeafModel leaf) : node_(std::move(leaf)) {}

  bool is_leaf() const { return std::holds_alternative<LeafModel>(node_); }
  const Branch& branch() const { return std::get<Branch>(node_); }
  const LeafModel& leaf() const { return std::get<LeafModel>(node_); }

 private:
  std::variant<Branch, LeafModel> node_;
};

/// One binary-target tree: oblique branch nodes over a target/rest labelling
/// of the training data, with a membership model in every leaf.
struct LhTree {
  std::unique_ptr<TreeNode> root;
  int target_class = 0;
  TreeParams params;
  std::size_t node_count = 0;
  std::size_t leaf_count = 0;
  std::size_t depth = 0;
};

/// Grows a tree for `target_class` against all other classes. A block becomes
/// a leaf when it is pure, smaller than min_samples, at max_depth, has no
/// usable weights (all features filtered or every class-mean difference zero),
/// or all rows share one weighted sum. Throws when the data contains no row
/// of the target class.
LhTree build_tree(const Dataset& train, int target_class, const TreeParams& params);

/// Same, with hyperplane construction restricted to `allowed_features`
/// (leaf models still use every feature).
LhTree build_tree(const Dataset& train, int target_class, const TreeParams& params,
                  const std::vector<std::size_t>& allowed_features);

/// Fits the leaf membership model over the block's rows: slope
/// cov(X_i, P) / var(X_i) per feature (zero for constant features), stored
/// feature means, and the mean of the binary labels.
LeafModel fit_leaf(const Block& rows, const Dataset& data,
                   std::span<const std::uint8_t> binary_labels);

/// Routes x to a leaf and evaluates its clipped membership model.
double membership(const LhTree& tree, std::span<const double> x);

struct LeafStats {
  std::size_t size = 0;
  double purity = 0.0;  // majority fraction of the leaf's binary labels
};

struct TreeStats {
  std::size_t depth = 0;
  std::size_t node_count = 0;
  std::size_t leaf_count = 0;
  std::vector<LeafStats> leaves;  // preorder
};

TreeStats tree_stats(const LhTree& tree);

}  // namespace lht

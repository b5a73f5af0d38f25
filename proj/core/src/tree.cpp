#include "lht/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lht {

namespace {

std::size_t tree_feature_count(const LhTree& tree) {
  const TreeNode* node = tree.root.get();
  return node->is_leaf() ? node->leaf().slopes.size()
                         : node->branch().plan.weights.weights.size();
}

struct BuildState {
  const Dataset& data;
  const TreeParams& params;
  const std::vector<std::size_t>* allowed_features;  // nullptr: all features
  std::size_t node_count = 0;
  std::size_t leaf_count = 0;
  std::size_t max_leaf_depth = 0;
};

std::unique_ptr<TreeNode> make_leaf(BuildState& state, const Block& block, unsigned depth) {
  ++state.node_count;
  ++state.leaf_count;
  state.max_leaf_depth = std::max<std::size_t>(state.max_leaf_depth, depth);
  return std::make_unique<TreeNode>(fit_leaf(block, state.data, block.is_target));
}

std::unique_ptr<TreeNode> build_node(BuildState& state, Block block, unsigned depth) {
  if (block.is_pure() || block.size() < state.params.min_samples ||
      depth >= state.params.max_depth) {
    return make_leaf(state, block, depth);
  }

  std::vector<std::size_t> features = variance_filter(block, state.data, state.params.alpha);
  if (state.allowed_features) {
    std::vector<std::size_t> masked;
    std::set_intersection(features.begin(), features.end(), state.allowed_features->begin(),
                          state.allowed_features->end(), std::back_inserter(masked));
    features = std::move(masked);
  }
  if (features.empty()) return make_leaf(state, block, depth);

  const SeparationDegrees sep = separation_degrees(block, state.data, features);
  if (sep.sd_max == 0.0) return make_leaf(state, block, depth);

  SplitPlan plan;
  plan.weights = compute_weights(sep.sd, sep.sd_max, state.params.beta);
  const std::vector<double> fs = feature_sums(block, state.data, plan.weights);
  const auto [fs_min, fs_max] = std::minmax_element(fs.begin(), fs.end());
  if (*fs_min == *fs_max) return make_leaf(state, block, depth);

  const FsSummary summary = summarize_fs_values(fs, block.is_target);
  const ThresholdChoice choice = select_threshold(summary, state.params.gamma);
  plan.threshold = choice.threshold;
  plan.left_inclusive = choice.left_inclusive;
  plan.chosen_case = choice.chosen_case;

  auto [left, right] = apply_split_values(block, fs, plan);
  block = Block{};  // children own the rows now

  TreeNode::Branch branch;
  branch.plan = std::move(plan);
  branch.left_rows = left.size();
  branch.right_rows = right.size();
  branch.left = build_node(state, std::move(left), depth + 1);
  branch.right = build_node(state, std::move(right), depth + 1);
  ++state.node_count;
  return std::make_unique<TreeNode>(std::move(branch));
}

void collect_stats(const TreeNode& node, std::size_t depth, TreeStats& stats) {
  stats.depth = std::max(stats.depth, depth);
  ++stats.node_count;
  if (node.is_leaf()) {
    ++stats.leaf_count;
    const LeafModel& leaf = node.leaf();
    stats.leaves.push_back(
        {leaf.sample_count, std::max(leaf.label_mean, 1.0 - leaf.label_mean)});
    return;
  }
  collect_stats(*node.branch().left, depth + 1, stats);
  collect_stats(*node.branch().right, depth + 1, stats);
}

}  // namespace

double LeafModel::predict_raw(std::span<const double> x) const {
  if (x.size() != slopes.size()) {
    throw std::invalid_argument("membership input has " + std::to_string(x.size()) +
                                " features, model expects " + std::to_string(slopes.size()));
  }
  double value = label_mean;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    value += slopes[i] * (x[i] - feature_means[i]);
  }
  return value;
}

double LeafModel::predict(std::span<const double> x) const {
  return std::clamp(predict_raw(x), 0.0, 1.0);
}

LeafModel fit_leaf(const Block& rows, const Dataset& data,
                   std::span<const std::uint8_t> binary_labels) {
  if (rows.size() == 0) throw std::invalid_argument("fit_leaf needs a non-empty block");
  if (binary_labels.size() != rows.size()) {
    throw std::invalid_argument("fit_leaf: label count does not match row count");
  }
  const std::size_t m = data.cols();
  const double n = static_cast<double>(rows.size());

  LeafModel model;
  model.sample_count = static_cast<std::uint32_t>(rows.size());
  model.slopes.assign(m, 0.0);
  model.feature_means.assign(m, 0.0);

  double label_sum = 0.0;
  for (std::uint8_t p : binary_labels) label_sum += p;
  model.label_mean = label_sum / n;

  for (std::size_t f = 0; f < m; ++f) {
    double lo = data.at(rows.rows.front(), f);
    double hi = lo;
    double sum = 0.0;
    for (std::uint32_t r : rows.rows) {
      const double v = data.at(r, f);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    const double mean = sum / n;
    model.feature_means[f] = mean;
    if (lo == hi) continue;  // constant feature keeps slope zero

    double covariance = 0.0;
    double variance = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double dx = data.at(rows.rows[i], f) - mean;
      covariance += dx * (binary_labels[i] - model.label_mean);
      variance += dx * dx;
    }
    model.slopes[f] = covariance / variance;
  }
  return model;
}

LhTree build_tree(const Dataset& train, int target_class, const TreeParams& params) {
  return build_tree(train, target_class, params, {});
}

LhTree build_tree(const Dataset& train, int target_class, const TreeParams& params,
                  const std::vector<std::size_t>& allowed_features) {
  if (params.gamma == 0) throw std::invalid_argument("gamma must be positive");
  if (params.min_samples == 0) throw std::invalid_argument("min_samples must be positive");
  if (params.max_depth == 0) throw std::invalid_argument("max_depth must be positive");
  if (params.beta < 0.0 || params.beta > 1.0) {
    throw std::invalid_argument("beta must lie in [0,1]");
  }
  if (train.rows() == 0) throw std::invalid_argument("cannot build a tree on empty data");

  Block root;
  root.rows.resize(train.rows());
  root.is_target.resize(train.rows());
  std::size_t target_count = 0;
  for (std::size_t r = 0; r < train.rows(); ++r) {
    root.rows[r] = static_cast<std::uint32_t>(r);
    const bool is_target = train.label(r) == target_class;
    root.is_target[r] = is_target ? 1 : 0;
    target_count += is_target;
  }
  if (target_count == 0) {
    throw std::runtime_error("no rows of target class " + std::to_string(target_class));
  }

  BuildState state{train, params, allowed_features.empty() ? nullptr : &allowed_features};
  LhTree tree;
  tree.root = build_node(state, std::move(root), 0);
  tree.target_class = target_class;
  tree.params = params;
  tree.node_count = state.node_count;
  tree.leaf_count = state.leaf_count;
  tree.depth = state.max_leaf_depth;
  return tree;
}

double membership(const LhTree& tree, std::span<const double> x) {
  if (x.size() != tree_feature_count(tree)) {
    throw std::invalid_argument("membership input has " + std::to_string(x.size()) +
                                " features, tree expects " +
                                std::to_string(tree_feature_count(tree)));
  }
  const TreeNode* node = tree.root.get();
  while (!node->is_leaf()) {
    const TreeNode::Branch& branch = node->branch();
    const double fs = feature_sum(x, branch.plan.weights);
    node = branch.plan.routes_left(fs) ? branch.left.get() : branch.right.get();
  }
  return node->leaf().predict(x);
}

TreeStats tree_stats(const LhTree& tree) {
  TreeStats stats;
  collect_stats(*tree.root, 0, stats);
  return stats;
}

}  // namespace lht

#include "lht/explain.hpp"

#include <cmath>
#include <stdexcept>

namespace lht {

namespace {

void collect_records(const TreeNode& node, int class_id, int tree_index, std::string& path,
                     std::vector<NodeWeightRecord>& records) {
  if (node.is_leaf()) return;
  const TreeNode::Branch& branch = node.branch();

  NodeWeightRecord record;
  record.class_id = class_id;
  record.tree_index = tree_index;
  record.node_path = path;
  record.weights = branch.plan.weights.weights;
  record.threshold = branch.plan.threshold;
  record.chosen_case = branch.plan.chosen_case;
  record.left_rows = branch.left_rows;
  record.right_rows = branch.right_rows;
  records.push_back(std::move(record));

  path.push_back('L');
  collect_records(*branch.left, class_id, tree_index, path, records);
  path.back() = 'R';
  collect_records(*branch.right, class_id, tree_index, path, records);
  path.pop_back();
}

}  // namespace

std::vector<NodeWeightRecord> extract_node_weights(const LhForest& forest) {
  std::vector<NodeWeightRecord> records;
  std::string path;
  for (std::size_t c = 0; c < forest.class_count(); ++c) {
    for (std::size_t i = 0; i < forest.trees()[c].size(); ++i) {
      collect_records(*forest.trees()[c][i].root, static_cast<int>(c), static_cast<int>(i), path,
                      records);
    }
  }
  return records;
}

ImportanceSummary importance_summary(const std::vector<NodeWeightRecord>& records,
                                     ImportanceWeighting weighting, std::size_t n_features) {
  ImportanceSummary summary;
  summary.importance.assign(n_features, 0.0);
  if (records.empty()) return summary;

  double total_weight = 0.0;
  for (const NodeWeightRecord& record : records) {
    if (record.weights.size() != n_features) {
      throw std::invalid_argument("record weight count does not match feature count");
    }
    const double record_weight =
        weighting == ImportanceWeighting::ByNodeSize
            ? static_cast<double>(record.left_rows + record.right_rows)
            : 1.0;
    total_weight += record_weight;
    for (std::size_t f = 0; f < n_features; ++f) {
      summary.importance[f] += record_weight * std::abs(record.weights[f]);
    }
  }

  double sum = 0.0;
  for (double& value : summary.importance) {
    value /= total_weight;
    sum += value;
  }
  if (sum > 0.0) {
    for (double& value : summary.importance) value /= sum;
    summary.empty = false;
  }
  return summary;
}

}  // namespace lht

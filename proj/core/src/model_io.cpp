#include "lht/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lht {

namespace {

using json = nlohmann::ordered_json;

json node_to_json(const TreeNode& node) {
  json out;
  if (node.is_leaf()) {
    const LeafModel& leaf = node.leaf();
    out["node_kind"] = "leaf";
    out["slopes"] = leaf.slopes;
    out["feature_means"] = leaf.feature_means;
    out["label_mean"] = leaf.label_mean;
    out["sample_count"] = leaf.sample_count;
    return out;
  }
  const TreeNode::Branch& branch = node.branch();
  out["node_kind"] = "branch";
  out["weights"] = branch.plan.weights.weights;
  out["threshold"] = branch.plan.threshold;
  out["left_inclusive"] = branch.plan.left_inclusive;
  out["chosen_case"] = to_string(branch.plan.chosen_case);
  out["left_rows"] = branch.left_rows;
  out["right_rows"] = branch.right_rows;
  out["left"] = node_to_json(*branch.left);
  out["right"] = node_to_json(*branch.right);
  return out;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("model file invalid at " + path + ": " + what);
}

const json& require_field(const json& obj, const char* name, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(name);
  if (it == obj.end()) fail(path, std::string("missing field '") + name + "'");
  return *it;
}

double as_finite_double(const json& value, const std::string& path) {
  if (!value.is_number()) fail(path, "expected a number");
  const double out = value.get<double>();
  if (!std::isfinite(out)) fail(path, "number is not finite");
  return out;
}

std::uint64_t as_uint(const json& value, const std::string& path) {
  if (!value.is_number_unsigned() && !value.is_number_integer()) {
    fail(path, "expected a non-negative integer");
  }
  if (value.is_number_integer() && value.get<std::int64_t>() < 0) {
    fail(path, "expected a non-negative integer");
  }
  return value.get<std::uint64_t>();
}

std::vector<double> as_double_vector(const json& value, const std::string& path) {
  if (!value.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(value.size());
  for (const auto& entry : value) out.push_back(as_finite_double(entry, path));
  return out;
}

std::unique_ptr<TreeNode> node_from_json(const json& value, const std::string& path,
                                         std::size_t& n_features) {
  const std::string kind = require_field(value, "node_kind", path).get<std::string>();
  if (kind == "leaf") {
    LeafModel leaf;
    leaf.slopes = as_double_vector(require_field(value, "slopes", path), path + ".slopes");
    leaf.feature_means = as_double_vector(require_field(value, "feature_means", path),
                                          path + ".feature_means");
    leaf.label_mean = as_finite_double(require_field(value, "label_mean", path),
                                       path + ".label_mean");
    leaf.sample_count = static_cast<std::uint32_t>(
        as_uint(require_field(value, "sample_count", path), path + ".sample_count"));
    if (leaf.sample_count == 0) fail(path, "leaf has zero samples");
    if (leaf.slopes.empty()) fail(path, "leaf has no features");
    if (leaf.slopes.size() != leaf.feature_means.size()) {
      fail(path, "slopes and feature_means lengths differ");
    }
    if (n_features == 0) n_features = leaf.slopes.size();
    if (leaf.slopes.size() != n_features) fail(path, "inconsistent feature count");
    return std::make_unique<TreeNode>(std::move(leaf));
  }
  if (kind != "branch") fail(path, "node_kind must be 'branch' or 'leaf'");

  TreeNode::Branch branch;
  branch.plan.weights.weights =
      as_double_vector(require_field(value, "weights", path), path + ".weights");
  if (branch.plan.weights.weights.empty()) fail(path + ".weights", "branch has no features");
  for (std::size_t i = 0; i < branch.plan.weights.weights.size(); ++i) {
    const double w = branch.plan.weights.weights[i];
    if (std::abs(w) > 1.0) fail(path + ".weights", "weight magnitude exceeds 1");
    if (w != 0.0) branch.plan.weights.selected.push_back(i);
  }
  if (n_features == 0) n_features = branch.plan.weights.weights.size();
  if (branch.plan.weights.weights.size() != n_features) fail(path, "inconsistent feature count");

  branch.plan.threshold =
      as_finite_double(require_field(value, "threshold", path), path + ".threshold");
  const json& inclusive = require_field(value, "left_inclusive", path);
  if (!inclusive.is_boolean()) fail(path + ".left_inclusive", "expected a boolean");
  branch.plan.left_inclusive = inclusive.get<bool>();
  branch.plan.chosen_case = split_case_from_string(
      require_field(value, "chosen_case", path).get<std::string>());
  branch.left_rows = as_uint(require_field(value, "left_rows", path), path + ".left_rows");
  branch.right_rows = as_uint(require_field(value, "right_rows", path), path + ".right_rows");
  branch.left = node_from_json(require_field(value, "left", path), path + ".left", n_features);
  branch.right = node_from_json(require_field(value, "right", path), path + ".right", n_features);
  return std::make_unique<TreeNode>(std::move(branch));
}

void count_nodes(const TreeNode& node, std::size_t depth, LhTree& tree) {
  tree.depth = std::max(tree.depth, depth);
  ++tree.node_count;
  if (node.is_leaf()) {
    ++tree.leaf_count;
    return;
  }
  count_nodes(*node.branch().left, depth + 1, tree);
  count_nodes(*node.branch().right, depth + 1, tree);
}

}  // namespace

std::string serialize(const LhForest& forest) {
  json out;
  out["format_version"] = kModelFormatVersion;

  const ForestParams& params = forest.params();
  json params_json;
  params_json["trees_per_class"] = params.trees_per_class;
  params_json["beta_prime"] = params.beta_prime;
  params_json["forest_rate"] = params.forest_rate;
  params_json["seed"] = params.seed;
  params_json["feature_fraction"] =
      params.feature_fraction ? json(*params.feature_fraction) : json(nullptr);
  json base;
  base["alpha"] = params.base.alpha;
  base["gamma"] = params.base.gamma;
  base["min_samples"] = params.base.min_samples;
  base["max_depth"] = params.base.max_depth;
  params_json["base"] = std::move(base);
  out["params"] = std::move(params_json);

  if (forest.normalizer()) {
    json normalizer;
    normalizer["min"] = forest.normalizer()->min;
    normalizer["max"] = forest.normalizer()->max;
    out["normalizer"] = std::move(normalizer);
  } else {
    out["normalizer"] = nullptr;
  }

  out["label_mapping"] = forest.class_names();

  json classes = json::array();
  for (const auto& per_class : forest.trees()) {
    json class_trees = json::array();
    for (const LhTree& tree : per_class) class_trees.push_back(node_to_json(*tree.root));
    classes.push_back(std::move(class_trees));
  }
  out["classes"] = std::move(classes);
  return out.dump(2);
}

LhForest deserialize(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw std::runtime_error(std::string("model file is not valid JSON: ") + err.what());
  }

  const json& version = require_field(doc, "format_version", "$");
  if (!version.is_number_integer() ||
      version.get<std::int64_t>() != kModelFormatVersion) {
    throw std::runtime_error("unsupported model format_version: " + version.dump() +
                             " (expected " + std::to_string(kModelFormatVersion) + ")");
  }

  const json& params_json = require_field(doc, "params", "$");
  ForestParams params;
  params.trees_per_class = static_cast<unsigned>(
      as_uint(require_field(params_json, "trees_per_class", "$.params"), "$.params.trees_per_class"));
  params.beta_prime = as_finite_double(require_field(params_json, "beta_prime", "$.params"),
                                       "$.params.beta_prime");
  params.forest_rate = as_finite_double(require_field(params_json, "forest_rate", "$.params"),
                                        "$.params.forest_rate");
  params.seed = as_uint(require_field(params_json, "seed", "$.params"), "$.params.seed");
  const json& fraction = require_field(params_json, "feature_fraction", "$.params");
  if (!fraction.is_null()) {
    params.feature_fraction = as_finite_double(fraction, "$.params.feature_fraction");
  }
  const json& base = require_field(params_json, "base", "$.params");
  params.base.alpha = as_finite_double(require_field(base, "alpha", "$.params.base"),
                                       "$.params.base.alpha");
  params.base.gamma = static_cast<unsigned>(
      as_uint(require_field(base, "gamma", "$.params.base"), "$.params.base.gamma"));
  params.base.min_samples = static_cast<unsigned>(
      as_uint(require_field(base, "min_samples", "$.params.base"), "$.params.base.min_samples"));
  params.base.max_depth = static_cast<unsigned>(
      as_uint(require_field(base, "max_depth", "$.params.base"), "$.params.base.max_depth"));

  std::optional<NormalizationStats> normalizer;
  const json& normalizer_json = require_field(doc, "normalizer", "$");
  if (!normalizer_json.is_null()) {
    NormalizationStats stats;
    stats.min = as_double_vector(require_field(normalizer_json, "min", "$.normalizer"),
                                 "$.normalizer.min");
    stats.max = as_double_vector(require_field(normalizer_json, "max", "$.normalizer"),
                                 "$.normalizer.max");
    if (stats.min.size() != stats.max.size()) {
      fail("$.normalizer", "min and max lengths differ");
    }
    for (std::size_t i = 0; i < stats.min.size(); ++i) {
      if (stats.min[i] > stats.max[i]) fail("$.normalizer", "min exceeds max");
    }
    normalizer = std::move(stats);
  }

  const json& mapping = require_field(doc, "label_mapping", "$");
  if (!mapping.is_array()) fail("$.label_mapping", "expected an array");
  std::vector<std::string> class_names;
  for (const auto& entry : mapping) {
    if (!entry.is_string()) fail("$.label_mapping", "expected strings");
    class_names.push_back(entry.get<std::string>());
  }

  const json& classes = require_field(doc, "classes", "$");
  if (!classes.is_array() || classes.empty()) fail("$.classes", "expected a non-empty array");
  if (classes.size() != class_names.size()) {
    fail("$.classes", "class count does not match label_mapping");
  }

  std::size_t n_features = normalizer ? normalizer->size() : 0;
  std::vector<std::vector<LhTree>> trees(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const json& class_trees = classes[c];
    const std::string class_path = "$.classes[" + std::to_string(c) + "]";
    if (!class_trees.is_array()) fail(class_path, "expected an array of trees");
    if (class_trees.size() != params.trees_per_class) {
      fail(class_path, "tree count does not match params.trees_per_class");
    }
    trees[c].reserve(class_trees.size());
    for (std::size_t i = 0; i < class_trees.size(); ++i) {
      const std::string tree_path = class_path + "[" + std::to_string(i) + "]";
      LhTree tree;
      tree.root = node_from_json(class_trees[i], tree_path, n_features);
      tree.target_class = static_cast<int>(c);
      tree.params = params.base;
      tree.params.beta = schedule_beta(params, static_cast<unsigned>(i));
      count_nodes(*tree.root, 0, tree);
      trees[c].push_back(std::move(tree));
    }
  }

  return LhForest(std::move(trees), std::move(class_names), std::move(normalizer),
                  std::move(params), n_features);
}

void save(const LhForest& forest, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file.is_open()) throw std::runtime_error("cannot open for writing: " + path.string());
  file << serialize(forest) << '\n';
  file.flush();
  if (!file.good()) throw std::runtime_error("write failed: " + path.string());
}

LhForest load(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file.is_open()) throw std::runtime_error("cannot open model file: " + path.string());
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return deserialize(buffer.str());
}

}  // namespace lht

// lht: train, score, and inspect learning-hyperplane-tree models from CSV data.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lht/dataset.hpp"
#include "lht/explain.hpp"
#include "lht/forest.hpp"
#include "lht/model_io.hpp"
#include "lht/random.hpp"

namespace {

struct Options {
  std::string data;
  std::string test;
  std::string label_col;
  std::string model;
  std::string out;
  double alpha = 0.0;
  double beta_prime = 0.0;
  double forest_rate = 1.0;
  std::optional<double> feature_fraction;
  unsigned gamma = 2;
  unsigned min_samples = 2;
  unsigned max_depth = 50;
  unsigned trees_per_class = 1;
  unsigned runs = 10;
  std::uint64_t seed = 0;
  bool no_normalize = false;
};

std::string format_double(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

std::string format_percent(double fraction) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.1f", fraction * 100.0);
  return buffer;
}

lht::LabelColumn resolve_label(const Options& options, const std::string& path) {
  if (options.label_col.empty()) {
    // Default: the last column of the file.
    std::ifstream file(path);
    if (!file.is_open()) throw std::runtime_error("cannot open file: " + path);
    std::string line;
    if (!std::getline(file, line)) throw std::runtime_error("empty file: " + path);
    const std::size_t cols =
        static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    return lht::LabelColumn::by_index(cols - 1);
  }
  std::size_t index = 0;
  auto [ptr, ec] = std::from_chars(options.label_col.data(),
                                   options.label_col.data() + options.label_col.size(), index);
  if (ec == std::errc{} && ptr == options.label_col.data() + options.label_col.size()) {
    return lht::LabelColumn::by_index(index);
  }
  return lht::LabelColumn::by_name(options.label_col);
}

lht::ForestParams forest_params(const Options& options) {
  lht::ForestParams params;
  params.trees_per_class = options.trees_per_class;
  params.beta_prime = options.beta_prime;
  params.forest_rate = options.forest_rate;
  params.feature_fraction = options.feature_fraction;
  params.seed = options.seed;
  params.base.alpha = options.alpha;
  params.base.gamma = options.gamma;
  params.base.min_samples = options.min_samples;
  params.base.max_depth = options.max_depth;
  return params;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file.is_open()) throw std::runtime_error("cannot open for writing: " + path);
  return file;
}

void finish_output(std::ofstream& file, const std::string& path) {
  file.flush();
  if (!file.good()) throw std::runtime_error("write failed: " + path);
}

struct AccuracyStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
};

AccuracyStats accuracy_stats(const std::vector<double>& values) {
  AccuracyStats stats;
  for (double v : values) stats.mean += v;
  stats.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - stats.mean) * (v - stats.mean);
    stats.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return stats;
}

int cmd_train(const Options& options) {
  const lht::Dataset data = lht::load_csv(options.data, resolve_label(options, options.data));
  const auto start = std::chrono::steady_clock::now();
  const lht::LhForest forest =
      lht::train_forest(data, forest_params(options), !options.no_normalize);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  lht::save(forest, options.model);

  std::string node_counts;
  for (std::size_t c = 0; c < forest.class_count(); ++c) {
    std::size_t nodes = 0;
    for (const lht::LhTree& tree : forest.trees()[c]) nodes += tree.node_count;
    node_counts += (c ? "," : "") + std::to_string(nodes);
  }
  std::cout << "trained k=" << forest.class_count() << " t=" << forest.trees_per_class()
            << " nodes_per_class=[" << node_counts << "] wall_time="
            << format_double(elapsed.count()) << "s\n";
  std::cout << "model written: " << options.model << "\n";
  return 0;
}

int cmd_predict(const Options& options) {
  const lht::LhForest forest = lht::load(options.model);

  std::optional<lht::LabelColumn> drop;
  if (!options.label_col.empty()) {
    drop = resolve_label(options, options.data);
  } else {
    // Drop a trailing label column only when the width says one is present.
    std::ifstream file(options.data);
    std::string line;
    if (file.is_open() && std::getline(file, line)) {
      const std::size_t cols =
          static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
      if (cols == forest.feature_count() + 1) drop = lht::LabelColumn::by_index(cols - 1);
    }
  }
  const lht::FeatureMatrix inputs =
      lht::load_feature_csv(options.data, drop, lht::HeaderMode::Auto, forest.feature_count());

  const std::vector<lht::ClassScores> scores = lht::predict_batch(forest, inputs);

  std::ofstream out = open_output(options.out);
  out << "row_index,predicted_class";
  for (std::size_t c = 0; c < forest.class_count(); ++c) out << ",score_" << c;
  out << "\n";
  for (std::size_t r = 0; r < scores.size(); ++r) {
    out << r << ',' << forest.class_name(scores[r].predicted);
    for (double s : scores[r].scores) out << ',' << format_double(s);
    out << "\n";
  }
  finish_output(out, options.out);
  std::cout << "predictions written: " << options.out << " (" << scores.size() << " rows)\n";
  return 0;
}

int cmd_evaluate(const Options& options) {
  const lht::Dataset data = lht::load_csv(options.data, resolve_label(options, options.data));
  std::vector<double> accuracies;
  accuracies.reserve(options.runs);

  if (options.test.empty()) {
    // Repeated seeded 80/20 split, train, evaluate.
    for (unsigned run = 0; run < options.runs; ++run) {
      const std::uint64_t run_seed = lht::derive_seed(options.seed, run);
      auto [train, test] = lht::train_test_split(data, {0.8, run_seed});
      lht::ForestParams params = forest_params(options);
      params.seed = run_seed;
      const lht::LhForest forest = lht::train_forest(train, params, !options.no_normalize);
      accuracies.push_back(lht::evaluate(forest, test).accuracy);
    }
  } else {
    // Fixed split: train once, bootstrap the test set per run.
    const lht::Dataset test = lht::load_csv(options.test, resolve_label(options, options.test));
    const lht::LhForest forest =
        lht::train_forest(data, forest_params(options), !options.no_normalize);
    for (unsigned run = 0; run < options.runs; ++run) {
      std::mt19937_64 rng(lht::derive_seed(options.seed, run));
      std::vector<std::size_t> indices(test.rows());
      for (std::size_t& index : indices) index = lht::uniform_index(rng, test.rows());
      accuracies.push_back(lht::evaluate(forest, test.select_rows(indices)).accuracy);
    }
  }

  std::string report;
  for (std::size_t run = 0; run < accuracies.size(); ++run) {
    report += "run " + std::to_string(run + 1) + ": " + format_percent(accuracies[run]) + "\n";
  }
  const AccuracyStats stats = accuracy_stats(accuracies);
  report += "accuracy: " + format_percent(stats.mean);
  if (accuracies.size() > 1) report += " ± " + format_percent(stats.stddev);
  report += "\n";

  std::cout << report;
  if (!options.out.empty()) {
    std::ofstream out = open_output(options.out);
    out << report;
    finish_output(out, options.out);
  }
  return 0;
}

int cmd_importance(const Options& options) {
  const lht::LhForest forest = lht::load(options.model);
  const std::vector<lht::NodeWeightRecord> records = lht::extract_node_weights(forest);
  const lht::ImportanceSummary summary =
      lht::importance_summary(records, lht::ImportanceWeighting::Uniform, forest.feature_count());

  const std::string records_path = options.out + ".records.csv";
  const std::string summary_path = options.out + ".summary.csv";

  std::ofstream records_file = open_output(records_path);
  records_file << "class_id,tree_index,node_path,threshold,chosen_case,left_rows,right_rows";
  for (std::size_t f = 0; f < forest.feature_count(); ++f) records_file << ",w_" << f;
  records_file << "\n";
  for (const lht::NodeWeightRecord& record : records) {
    records_file << record.class_id << ',' << record.tree_index << ',' << record.node_path << ','
                 << format_double(record.threshold) << ',' << to_string(record.chosen_case) << ','
                 << record.left_rows << ',' << record.right_rows;
    for (double w : record.weights) records_file << ',' << format_double(w);
    records_file << "\n";
  }
  finish_output(records_file, records_path);

  std::ofstream summary_file = open_output(summary_path);
  summary_file << "feature_index,importance\n";
  if (!summary.empty) {
    for (std::size_t f = 0; f < summary.importance.size(); ++f) {
      summary_file << f << ',' << format_double(summary.importance[f]) << "\n";
    }
  }
  finish_output(summary_file, summary_path);

  std::cout << "records written: " << records_path << " (" << records.size() << " rows)\n";
  std::cout << "summary written: " << summary_path << "\n";
  return 0;
}

int cmd_bench(const Options& options) {
  const lht::Dataset data = lht::load_csv(options.data, resolve_label(options, options.data));

  lht::Dataset train = data;
  std::optional<lht::Dataset> test;
  if (!options.test.empty()) {
    test = lht::load_csv(options.test, resolve_label(options, options.test));
  } else {
    auto [train_part, test_part] = lht::train_test_split(data, {0.8, options.seed});
    train = std::move(train_part);
    test = std::move(test_part);
  }

  std::vector<lht::TreeTiming> timings;
  const lht::LhForest forest =
      lht::train_forest_timed(train, forest_params(options), !options.no_normalize, timings);

  double total = 0.0;
  double max_tree = 0.0;
  for (const lht::TreeTiming& timing : timings) {
    std::cout << "tree class=" << timing.class_id << " index=" << timing.tree_index
              << " time=" << format_double(timing.seconds) << "s\n";
    total += timing.seconds;
    max_tree = std::max(max_tree, timing.seconds);
  }
  std::cout << "total_train_time: " << format_double(total) << "s\n";
  std::cout << "max_tree_time: " << format_double(max_tree) << "s\n";
  std::cout << "accuracy: " << format_percent(lht::evaluate(forest, *test).accuracy) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning hyperplane tree classifier"};
  app.require_subcommand(1);

  Options options;
  auto add_common = [&options](CLI::App* cmd, bool with_hyperparams) {
    cmd->add_option("--label-col", options.label_col,
                    "Label column name or 0-based index (default: last column)");
    cmd->add_option("--seed", options.seed, "Master random seed");
    if (with_hyperparams) {
      cmd->add_option("--alpha", options.alpha, "Variance filter threshold")
          ->check(CLI::NonNegativeNumber);
      cmd->add_option("--beta-prime", options.beta_prime,
                      "Feature selection schedule constant (plain beta when t=1)")
          ->check(CLI::Range(0.0, 1.0));
      cmd->add_option("--gamma", options.gamma, "Minimum pure-side size for a purity cut")
          ->check(CLI::Range(1u, 1000000000u));
      cmd->add_option("--min-samples", options.min_samples, "Minimum rows to split a node")
          ->check(CLI::Range(1u, 1000000000u));
      cmd->add_option("--max-depth", options.max_depth, "Maximum tree depth")
          ->check(CLI::Range(1u, 1000000u));
      cmd->add_option("--trees-per-class", options.trees_per_class, "Ensemble size per class")
          ->check(CLI::Range(1u, 1000000u));
      cmd->add_option("--forest-rate", options.forest_rate, "Row subsample fraction per tree")
          ->check(CLI::Range(1e-9, 1.0));
      cmd->add_option("--feature-fraction", options.feature_fraction,
                      "Feature subsample fraction per tree (off by default)")
          ->check(CLI::Range(1e-9, 1.0));
      cmd->add_flag("--no-normalize", options.no_normalize, "Skip min-max scaling");
    }
  };

  CLI::App* train = app.add_subcommand("train", "Train a model and write it to --model");
  train->add_option("--data", options.data, "Training CSV")->required();
  train->add_option("--model", options.model, "Output model path")->required();
  add_common(train, true);

  CLI::App* predict = app.add_subcommand("predict", "Score rows with a trained model");
  predict->add_option("--data", options.data, "Input CSV (label column optional)")->required();
  predict->add_option("--model", options.model, "Model path")->required();
  predict->add_option("--out", options.out, "Output predictions CSV")->required();
  add_common(predict, false);

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Run seeded split/train/evaluate cycles and report accuracy");
  evaluate->add_option("--data", options.data, "Training CSV")->required();
  evaluate->add_option("--test", options.test, "Fixed test CSV (bootstrapped per run)");
  evaluate->add_option("--runs", options.runs, "Number of runs")->check(CLI::Range(1u, 1000000u));
  evaluate->add_option("--out", options.out, "Also write the report to this path");
  add_common(evaluate, true);

  CLI::App* importance = app.add_subcommand(
      "importance", "Export branch weight records and the feature importance summary");
  importance->add_option("--model", options.model, "Model path")->required();
  importance->add_option("--out", options.out, "Output prefix for .records.csv/.summary.csv")
      ->required();
  add_common(importance, false);

  CLI::App* bench = app.add_subcommand("bench", "Time sequential training and report accuracy");
  bench->add_option("--data", options.data, "Training CSV")->required();
  bench->add_option("--test", options.test, "Fixed test CSV");
  add_common(bench, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  }

  try {
    if (train->parsed()) return cmd_train(options);
    if (predict->parsed()) return cmd_predict(options);
    if (evaluate->parsed()) return cmd_evaluate(options);
    if (importance->parsed()) return cmd_importance(options);
    if (bench->parsed()) return cmd_bench(options);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}

#include "lht/forest.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "lht/random.hpp"

namespace lht {

namespace {

constexpr int kSubsampleRetryBudget = 16;

void validate_params(const ForestParams& params) {
  if (params.trees_per_class == 0) throw std::invalid_argument("trees_per_class must be positive");
  if (params.beta_prime < 0.0 || params.beta_prime > 1.0) {
    throw std::invalid_argument("beta_prime must lie in [0,1]");
  }
  if (params.forest_rate <= 0.0 || params.forest_rate > 1.0) {
    throw std::invalid_argument("forest_rate must lie in (0,1]");
  }
  if (params.feature_fraction &&
      (*params.feature_fraction <= 0.0 || *params.feature_fraction > 1.0)) {
    throw std::invalid_argument("feature_fraction must lie in (0,1]");
  }
}

bool contains_class(const Dataset& data, int c) {
  return std::any_of(data.labels().begin(), data.labels().end(),
                     [c](int label) { return label == c; });
}

LhTree build_forest_tree(const Dataset& train, const ForestParams& params, int c,
                         unsigned index) {
  TreeParams tree_params = params.base;
  tree_params.beta = schedule_beta(params, index);

  const std::uint64_t seed = tree_seed(params, c, index);
  std::uint64_t row_seed = derive_seed(seed, 0);

  std::vector<std::size_t> allowed_features;
  if (params.feature_fraction) {
    const std::size_t count = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(*params.feature_fraction * static_cast<double>(train.cols()))));
    allowed_features = sample_without_replacement(train.cols(), count, derive_seed(seed, 1));
  }

  if (params.forest_rate >= 1.0) {
    return build_tree(train, c, tree_params, allowed_features);
  }
  for (int attempt = 0; attempt < kSubsampleRetryBudget; ++attempt, row_seed = next_seed(row_seed)) {
    Dataset subset = subsample(train, params.forest_rate, row_seed);
    if (!contains_class(subset, c)) continue;
    return build_tree(subset, c, tree_params, allowed_features);
  }
  throw std::runtime_error("subsample kept no rows of class " + std::to_string(c) + " after " +
                           std::to_string(kSubsampleRetryBudget) + " attempts");
}

std::vector<double> normalize_input(const LhForest& forest, std::span<const double> x) {
  std::vector<double> scaled(x.begin(), x.end());
  if (forest.normalizer()) {
    for (std::size_t i = 0; i < scaled.size(); ++i) {
      scaled[i] = forest.normalizer()->transform(scaled[i], i);
    }
  }
  return scaled;
}

}  // namespace

double schedule_beta(const ForestParams& params, unsigned index) {
  if (params.trees_per_class == 1) return params.beta_prime;
  return params.beta_prime * static_cast<double>(index) /
         static_cast<double>(params.trees_per_class);
}

std::uint64_t tree_seed(const ForestParams& params, int c, unsigned index) {
  return derive_seed(params.seed,
                     static_cast<std::uint64_t>(c) * params.trees_per_class + index);
}

LhForest::LhForest(std::vector<std::vector<LhTree>> trees, std::vector<std::string> class_names,
                   std::optional<NormalizationStats> normalizer, ForestParams params,
                   std::size_t n_features)
    : trees_(std::move(trees)),
      class_names_(std::move(class_names)),
      normalizer_(std::move(normalizer)),
      params_(std::move(params)),
      n_features_(n_features) {
  if (trees_.empty()) throw std::invalid_argument("forest needs at least one class");
  for (const auto& per_class : trees_) {
    if (per_class.size() != params_.trees_per_class) {
      throw std::invalid_argument("every class must have trees_per_class trees");
    }
  }
  if (class_names_.size() != trees_.size()) {
    throw std::invalid_argument("class name count does not match class count");
  }
  if (normalizer_ && normalizer_->size() != n_features_) {
    throw std::invalid_argument("normalizer feature count does not match");
  }
}

std::string LhForest::class_name(int c) const {
  if (static_cast<std::size_t>(c) < class_names_.size()) return class_names_[c];
  return std::to_string(c);
}

LhForest train_forest(const Dataset& train, const ForestParams& params, bool normalize,
                      unsigned threads) {
  validate_params(params);
  if (train.classes() < 2) throw std::invalid_argument("training data needs at least 2 classes");
  train.require_all_classes_present();

  std::optional<NormalizationStats> stats;
  Dataset prepared = train;
  if (normalize) {
    stats = fit_normalizer(train);
    prepared = apply_normalizer(train, *stats);
  }

  const std::size_t k = prepared.classes();
  const unsigned t = params.trees_per_class;
  std::vector<std::vector<LhTree>> trees(k);
  for (auto& per_class : trees) per_class.resize(t);

  const std::size_t total = k * t;
  auto run_task = [&](std::size_t task) {
    const int c = static_cast<int>(task / t);
    const unsigned index = static_cast<unsigned>(task % t);
    trees[c][index] = build_forest_tree(prepared, params, c, index);
  };

  if (threads <= 1 || total <= 1) {
    for (std::size_t task = 0; task < total; ++task) run_task(task);
  } else {
    // Tasks are independent and individually seeded, so any execution order
    // assembles the identical forest.
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
      while (true) {
        const std::size_t task = cursor.fetch_add(1);
        if (task >= total) return;
        try {
          run_task(task);
        } catch (...) {
          std::scoped_lock lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    const unsigned n_workers = std::min<unsigned>(threads, static_cast<unsigned>(total));
    pool.reserve(n_workers);
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<std::string> class_names = train.class_names();
  if (class_names.empty()) {
    for (std::size_t c = 0; c < k; ++c) class_names.push_back(std::to_string(c));
  }
  return LhForest(std::move(trees), std::move(class_names), std::move(stats), params,
                  prepared.cols());
}

LhForest train_forest_timed(const Dataset& train, const ForestParams& params, bool normalize,
                            std::vector<TreeTiming>& timings) {
  validate_params(params);
  if (train.classes() < 2) throw std::invalid_argument("training data needs at least 2 classes");
  train.require_all_classes_present();

  std::optional<NormalizationStats> stats;
  Dataset prepared = train;
  if (normalize) {
    stats = fit_normalizer(train);
    prepared = apply_normalizer(train, *stats);
  }

  timings.clear();
  std::vector<std::vector<LhTree>> trees(prepared.classes());
  for (std::size_t c = 0; c < prepared.classes(); ++c) {
    trees[c].reserve(params.trees_per_class);
    for (unsigned i = 0; i < params.trees_per_class; ++i) {
      const auto start = std::chrono::steady_clock::now();
      trees[c].push_back(build_forest_tree(prepared, params, static_cast<int>(c), i));
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      timings.push_back({static_cast<int>(c), i, elapsed.count()});
    }
  }

  std::vector<std::string> class_names = train.class_names();
  if (class_names.empty()) {
    for (std::size_t c = 0; c < prepared.classes(); ++c) class_names.push_back(std::to_string(c));
  }
  return LhForest(std::move(trees), std::move(class_names), std::move(stats), params,
                  prepared.cols());
}

ClassScores score(const LhForest& forest, std::span<const double> x) {
  if (x.size() != forest.feature_count()) {
    throw std::invalid_argument("score input has " + std::to_string(x.size()) +
                                " features, model expects " +
                                std::to_string(forest.feature_count()));
  }
  const std::vector<double> scaled = normalize_input(forest, x);

  ClassScores result;
  result.scores.resize(forest.class_count(), 0.0);
  for (std::size_t c = 0; c < forest.class_count(); ++c) {
    double sum = 0.0;
    for (const LhTree& tree : forest.trees()[c]) sum += membership(tree, scaled);
    result.scores[c] = sum / static_cast<double>(forest.trees_per_class());
  }

  result.predicted = 0;
  for (std::size_t c = 1; c < result.scores.size(); ++c) {
    if (result.scores[c] > result.scores[result.predicted]) {
      result.predicted = static_cast<int>(c);
    }
  }
  if (result.scores.size() > 1) {
    double runner_up = -1.0;
    for (std::size_t c = 0; c < result.scores.size(); ++c) {
      if (static_cast<int>(c) == result.predicted) continue;
      runner_up = std::max(runner_up, result.scores[c]);
    }
    result.margin = result.scores[result.predicted] - runner_up;
  } else {
    result.margin = result.scores.front();
  }
  return result;
}

std::vector<ClassScores> predict_batch(const LhForest& forest, const Dataset& data) {
  std::vector<ClassScores> out;
  out.reserve(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r) out.push_back(score(forest, data.row(r)));
  return out;
}

std::vector<ClassScores> predict_batch(const LhForest& forest, const FeatureMatrix& data) {
  std::vector<ClassScores> out;
  out.reserve(data.rows);
  for (std::size_t r = 0; r < data.rows; ++r) out.push_back(score(forest, data.row(r)));
  return out;
}

Evaluation evaluate(const LhForest& forest, const Dataset& test) {
  const std::size_t k = forest.class_count();
  if (test.classes() > k) {
    throw std::invalid_argument("test data has more classes than the model");
  }
  Evaluation eval;
  eval.confusion.assign(k, std::vector<std::size_t>(k, 0));
  std::size_t correct = 0;
  for (std::size_t r = 0; r < test.rows(); ++r) {
    const ClassScores scores = score(forest, test.row(r));
    ++eval.confusion[test.label(r)][scores.predicted];
    correct += scores.predicted == test.label(r);
  }
  eval.accuracy = test.rows() == 0 ? 0.0 : static_cast<double>(correct) / test.rows();
  return eval;
}

}  // namespace lht

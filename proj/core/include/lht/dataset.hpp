#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lht {

/// Immutable tabular dataset: an n-by-m matrix of finite reals (row major)
/// plus integer class labels in {0..k-1}. Class labels keep the original
/// text tokens in `class_names`, mapped by first appearance.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<double> features, std::vector<int> labels, std::size_t n_features,
          std::size_t n_classes, std::vector<std::string> feature_names = {},
          std::vector<std::string> class_names = {});

  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return n_features_; }
  std::size_t classes() const { return n_classes_; }

  double at(std::size_t row, std::size_t col) const {
    return features_[row * n_features_ + col];
  }
  std::span<const double> row(std::size_t r) const {
    return {features_.data() + r * n_features_, n_features_};
  }
  int label(std::size_t r) const { return labels_[r]; }

  const std::vector<double>& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  /// Name of class id `c`; falls back to the decimal id when no mapping exists.
  std::string class_name(int c) const;

  /// New dataset containing the given rows, in the given order.
  Dataset select_rows(std::span<const std::size_t> row_indices) const;

  /// Throws unless every class 0..k-1 occurs at least once.
  void require_all_classes_present() const;

 private:
  std::vector<double> features_;
  std::vector<int> labels_;
  std::size_t n_features_ = 0;
  std::size_t n_classes_ = 0;
  std::vector<std::string> feature_names_;
  std::vector<std::string> class_names_;
};

/// Feature rows without labels, for scoring inputs that carry no class column.
struct FeatureMatrix {
  std::vector<double> values;  // row major
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
};

/// Per-feature training min/max used for [0,1] min-max scaling.
struct NormalizationStats {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t size() const { return min.size(); }
  /// Scales one value: (x-min)/(max-min), 0 for constant features, clamped to [0,1].
  double transform(double value, std::size_t feature) const;
};

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

/// Identifies the label column either by 0-based index or by header name.
struct LabelColumn {
  static LabelColumn by_index(std::size_t i) { return {i, {}}; }
  static LabelColumn by_name(std::string n) { return {{}, std::move(n)}; }

  std::optional<std::size_t> index;
  std::optional<std::string> name;
};

enum class HeaderMode { Auto, Present, Absent };

/// Parses a comma-separated numeric file into a validated Dataset.
/// Labels map to 0..k-1 by first appearance; parse failures report the file
/// line and column. Rejects empty and single-class files.
Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column,
                 HeaderMode header = HeaderMode::Auto);

/// Parses feature rows only. An optional label column is dropped; zero data
/// rows are allowed. `expected_cols` (when nonzero) is checked after dropping.
FeatureMatrix load_feature_csv(const std::filesystem::path& path,
                               const std::optional<LabelColumn>& drop_column,
                               HeaderMode header = HeaderMode::Auto,
                               std::size_t expected_cols = 0);

NormalizationStats fit_normalizer(const Dataset& data);
Dataset apply_normalizer(const Dataset& data, const NormalizationStats& stats);

/// Deterministic disjoint train/test partition. The train part must contain
/// every class; otherwise the split is retried with successor seeds a fixed
/// number of times before failing.
std::pair<Dataset, Dataset> train_test_split(const Dataset& data, const SplitSpec& spec);

/// Uniform row sample without replacement; keeps original row order.
Dataset subsample(const Dataset& data, double fraction, std::uint64_t seed);

}  // namespace lht

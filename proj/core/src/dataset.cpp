#include "lht/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string_view>
#include <unordered_map>

#include "lht/random.hpp"

namespace lht {

namespace {

constexpr int kSplitRetryBudget = 100;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view token, double& out) {
  token = trim(token);
  if (token.empty()) return false;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.emplace_back(trim(std::string_view(line).substr(start)));
      break;
    }
    cells.emplace_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file.is_open()) {
    throw std::runtime_error("cannot open file: " + path.string());
  }
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(file, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_line(line));
  }
  return rows;
}

std::size_t resolve_label_index(const LabelColumn& label, const std::vector<std::string>& header,
                                bool has_header, std::size_t n_cols,
                                const std::filesystem::path& path) {
  if (label.index) {
    if (*label.index >= n_cols) {
      throw std::runtime_error("label column index " + std::to_string(*label.index) +
                               " out of range for " + std::to_string(n_cols) + " columns");
    }
    return *label.index;
  }
  if (!label.name) throw std::invalid_argument("label column is unset");
  if (!has_header) {
    throw std::runtime_error("label column '" + *label.name + "' requires a header row in " +
                             path.string());
  }
  auto it = std::find(header.begin(), header.end(), *label.name);
  if (it == header.end()) {
    throw std::runtime_error("label column '" + *label.name + "' not found in " + path.string());
  }
  return static_cast<std::size_t>(it - header.begin());
}

// A first row counts as a header when any cell outside the label column fails
// to parse as a number. Name-addressed label columns force header presence.
bool detect_header(const std::vector<std::string>& first_row,
                   const std::optional<std::size_t>& label_index) {
  for (std::size_t i = 0; i < first_row.size(); ++i) {
    if (label_index && *label_index == i) continue;
    double value;
    if (!parse_double(first_row[i], value)) return true;
  }
  return false;
}

}  // namespace

Dataset::Dataset(std::vector<double> features, std::vector<int> labels, std::size_t n_features,
                 std::size_t n_classes, std::vector<std::string> feature_names,
                 std::vector<std::string> class_names)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      n_features_(n_features),
      n_classes_(n_classes),
      feature_names_(std::move(feature_names)),
      class_names_(std::move(class_names)) {
  if (n_features_ == 0) throw std::invalid_argument("dataset needs at least one feature");
  if (features_.size() != labels_.size() * n_features_) {
    throw std::invalid_argument("feature matrix size does not match row count");
  }
  if (!feature_names_.empty() && feature_names_.size() != n_features_) {
    throw std::invalid_argument("feature name count does not match feature count");
  }
  if (!class_names_.empty() && class_names_.size() != n_classes_) {
    throw std::invalid_argument("class name count does not match class count");
  }
  for (double v : features_) {
    if (!std::isfinite(v)) throw std::invalid_argument("dataset contains a non-finite value");
  }
  for (int label : labels_) {
    if (label < 0 || static_cast<std::size_t>(label) >= n_classes_) {
      throw std::invalid_argument("label " + std::to_string(label) + " outside 0.." +
                                  std::to_string(n_classes_ - 1));
    }
  }
}

std::string Dataset::class_name(int c) const {
  if (static_cast<std::size_t>(c) < class_names_.size()) return class_names_[c];
  return std::to_string(c);
}

Dataset Dataset::select_rows(std::span<const std::size_t> row_indices) const {
  std::vector<double> features;
  features.reserve(row_indices.size() * n_features_);
  std::vector<int> labels;
  labels.reserve(row_indices.size());
  for (std::size_t r : row_indices) {
    auto row_span = row(r);
    features.insert(features.end(), row_span.begin(), row_span.end());
    labels.push_back(labels_[r]);
  }
  return Dataset(std::move(features), std::move(labels), n_features_, n_classes_, feature_names_,
                 class_names_);
}

void Dataset::require_all_classes_present() const {
  std::vector<bool> seen(n_classes_, false);
  for (int label : labels_) seen[label] = true;
  for (std::size_t c = 0; c < n_classes_; ++c) {
    if (!seen[c]) {
      throw std::runtime_error("class " + class_name(static_cast<int>(c)) + " has no rows");
    }
  }
}

double NormalizationStats::transform(double value, std::size_t feature) const {
  const double lo = min[feature];
  const double hi = max[feature];
  if (lo == hi) return 0.0;
  const double scaled = (value - lo) / (hi - lo);
  return std::clamp(scaled, 0.0, 1.0);
}

Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column,
                 HeaderMode header) {
  auto rows = read_rows(path);
  if (rows.empty()) throw std::runtime_error("empty dataset: " + path.string());

  const std::size_t n_cols = rows.front().size();
  if (n_cols < 2) throw std::runtime_error("need at least one feature and a label column");
  bool has_header = header == HeaderMode::Present;
  if (header == HeaderMode::Auto) {
    has_header = label_column.name ? true : detect_header(rows.front(), label_column.index);
  }
  const std::vector<std::string> header_row = has_header ? rows.front() : std::vector<std::string>{};
  const std::size_t label_index =
      resolve_label_index(label_column, header_row, has_header, n_cols, path);

  std::vector<std::string> feature_names;
  if (has_header) {
    for (std::size_t i = 0; i < n_cols; ++i) {
      if (i != label_index) feature_names.push_back(header_row[i]);
    }
  }

  const std::size_t first_data = has_header ? 1 : 0;
  if (rows.size() == first_data) throw std::runtime_error("empty dataset: " + path.string());

  const std::size_t m = n_cols - 1;
  std::vector<double> features;
  features.reserve((rows.size() - first_data) * m);
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::unordered_map<std::string, int> class_ids;

  for (std::size_t r = first_data; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (cells.size() != n_cols) {
      throw std::runtime_error("row " + std::to_string(r + 1) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(n_cols));
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (c == label_index) continue;
      double value;
      if (!parse_double(cells[c], value)) {
        const std::string col_name = has_header ? header_row[c] : std::to_string(c);
        throw std::runtime_error("cannot parse cell at row " + std::to_string(r + 1) +
                                 ", column " + col_name + ": '" + cells[c] + "'");
      }
      features.push_back(value);
    }
    const std::string& token = cells[label_index];
    if (token.empty()) {
      throw std::runtime_error("empty label at row " + std::to_string(r + 1));
    }
    auto [it, inserted] = class_ids.emplace(token, static_cast<int>(class_names.size()));
    if (inserted) class_names.push_back(token);
    labels.push_back(it->second);
  }

  if (class_names.size() < 2) {
    throw std::runtime_error("dataset has a single class: " + path.string());
  }
  const std::size_t k = class_names.size();
  Dataset data(std::move(features), std::move(labels), m, k, std::move(feature_names),
               std::move(class_names));
  data.require_all_classes_present();
  return data;
}

FeatureMatrix load_feature_csv(const std::filesystem::path& path,
                               const std::optional<LabelColumn>& drop_column, HeaderMode header,
                               std::size_t expected_cols) {
  auto rows = read_rows(path);
  if (rows.empty()) throw std::runtime_error("empty file: " + path.string());

  const std::size_t n_cols = rows.front().size();
  bool has_header = header == HeaderMode::Present;
  if (header == HeaderMode::Auto) {
    has_header = (drop_column && drop_column->name)
                     ? true
                     : detect_header(rows.front(),
                                     drop_column ? drop_column->index : std::optional<std::size_t>{});
  }
  const std::vector<std::string> header_row = has_header ? rows.front() : std::vector<std::string>{};

  std::optional<std::size_t> drop_index;
  if (drop_column) {
    // A named drop column that is absent is fine: the file is feature-only.
    if (drop_column->name && has_header) {
      auto it = std::find(header_row.begin(), header_row.end(), *drop_column->name);
      if (it != header_row.end()) drop_index = static_cast<std::size_t>(it - header_row.begin());
    } else if (drop_column->index && *drop_column->index < n_cols) {
      drop_index = drop_column->index;
    }
  }

  FeatureMatrix matrix;
  matrix.cols = n_cols - (drop_index ? 1 : 0);
  if (expected_cols != 0 && matrix.cols != expected_cols) {
    if (drop_index && n_cols == expected_cols) {
      // The file already lacks the label column; keep every column.
      drop_index.reset();
      matrix.cols = n_cols;
    } else {
      throw std::runtime_error("expected " + std::to_string(expected_cols) +
                               " feature columns, found " + std::to_string(matrix.cols) + " in " +
                               path.string());
    }
  }

  const std::size_t first_data = has_header ? 1 : 0;
  matrix.rows = rows.size() - first_data;
  matrix.values.reserve(matrix.rows * matrix.cols);
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (cells.size() != n_cols) {
      throw std::runtime_error("row " + std::to_string(r + 1) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(n_cols));
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (drop_index && *drop_index == c) continue;
      double value;
      if (!parse_double(cells[c], value)) {
        const std::string col_name = has_header ? header_row[c] : std::to_string(c);
        throw std::runtime_error("cannot parse cell at row " + std::to_string(r + 1) +
                                 ", column " + col_name + ": '" + cells[c] + "'");
      }
      matrix.values.push_back(value);
    }
  }
  return matrix;
}

NormalizationStats fit_normalizer(const Dataset& data) {
  if (data.rows() == 0) throw std::invalid_argument("cannot fit normalizer on empty data");
  NormalizationStats stats;
  stats.min.assign(data.cols(), 0.0);
  stats.max.assign(data.cols(), 0.0);
  for (std::size_t c = 0; c < data.cols(); ++c) {
    double lo = data.at(0, c);
    double hi = lo;
    for (std::size_t r = 1; r < data.rows(); ++r) {
      lo = std::min(lo, data.at(r, c));
      hi = std::max(hi, data.at(r, c));
    }
    stats.min[c] = lo;
    stats.max[c] = hi;
  }
  return stats;
}

Dataset apply_normalizer(const Dataset& data, const NormalizationStats& stats) {
  if (stats.size() != data.cols()) {
    throw std::invalid_argument("normalizer has " + std::to_string(stats.size()) +
                                " features, data has " + std::to_string(data.cols()));
  }
  std::vector<double> transformed(data.features().size());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.cols(); ++c) {
      transformed[r * data.cols() + c] = stats.transform(data.at(r, c), c);
    }
  }
  return Dataset(std::move(transformed), data.labels(), data.cols(), data.classes(),
                 data.feature_names(), data.class_names());
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& data, const SplitSpec& spec) {
  if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0) {
    throw std::invalid_argument("train_fraction must lie in (0,1)");
  }
  if (data.rows() < 2) throw std::invalid_argument("need at least two rows to split");

  const std::size_t n = data.rows();
  std::size_t n_train = static_cast<std::size_t>(spec.train_fraction * static_cast<double>(n));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

  std::uint64_t seed = spec.seed;
  for (int attempt = 0; attempt < kSplitRetryBudget; ++attempt, seed = next_seed(seed)) {
    std::vector<std::size_t> indices(n);
    for (std::size_t i = 0; i < n; ++i) indices[i] = i;
    std::mt19937_64 rng(seed);
    fisher_yates_shuffle(indices, rng);

    std::vector<std::size_t> train_idx(indices.begin(), indices.begin() + n_train);
    std::vector<std::size_t> test_idx(indices.begin() + n_train, indices.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    std::vector<bool> seen(data.classes(), false);
    for (std::size_t i : train_idx) seen[data.label(i)] = true;
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) continue;

    return {data.select_rows(train_idx), data.select_rows(test_idx)};
  }
  throw std::runtime_error("could not produce a train split containing every class after " +
                           std::to_string(kSplitRetryBudget) + " attempts");
}

Dataset subsample(const Dataset& data, double fraction, std::uint64_t seed) {
  if (fraction <= 0.0 || fraction > 1.0) {
    throw std::invalid_argument("subsample fraction must lie in (0,1]");
  }
  const std::size_t count = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(data.rows())));
  auto indices = sample_without_replacement(data.rows(), count, seed);
  return data.select_rows(indices);
}

}  // namespace lht

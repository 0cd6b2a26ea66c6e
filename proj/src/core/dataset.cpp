#include "core/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "core/errors.hpp"
#include "core/numeric.hpp"
#include "core/rng.hpp"
#include "core/serialize.hpp"

namespace distex {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(cell);
  for (auto& s : cells) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  }
  return cells;
}

double parse_cell(const std::string& cell, size_t row, const std::string& column) {
  if (cell.empty())
    throw ParseError("missing value at row " + std::to_string(row) + ", column '" + column + "'");
  double value = 0.0;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                     ", column '" + column + "'");
  return value;
}

void binarize_labels(std::vector<double>& labels, const CsvSchema& schema) {
  if (schema.rule == LabelRule::none) return;
  std::set<double> uniques(labels.begin(), labels.end());
  if (uniques.size() < 2) throw InvalidArgumentError("label column has a single class");
  const bool two = uniques.size() == 2;
  if (schema.rule == LabelRule::binary && !two)
    throw InvalidArgumentError("label column is not binary");
  if (two && schema.rule != LabelRule::quantile) {
    const double hi = *uniques.rbegin();
    for (double& v : labels) v = (v == hi) ? 1.0 : -1.0;
    return;
  }
  const double q = schema.rule == LabelRule::quantile ? schema.quantile : 0.5;
  if (!(q > 0.0 && q < 1.0)) throw InvalidArgumentError("label quantile must lie in (0, 1)");
  const double threshold = quantile(labels, q);
  for (double& v : labels) v = (v >= threshold) ? 1.0 : -1.0;
  bool pos = false, neg = false;
  for (double v : labels) (v > 0 ? pos : neg) = true;
  if (!pos || !neg)
    throw InvalidArgumentError("label thresholding produced a single class");
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file '" + path + "'");
  const std::vector<std::string> header = split_csv_line(line);

  int label_col = -1;
  for (size_t c = 0; c < header.size(); ++c)
    if (header[c] == schema.label_column) label_col = static_cast<int>(c);
  if (label_col < 0)
    throw ParseError("label column '" + schema.label_column + "' not found in '" + path + "'");

  Dataset ds;
  ds.label_name = schema.label_column;
  for (size_t c = 0; c < header.size(); ++c)
    if (static_cast<int>(c) != label_col) ds.feature_names.push_back(header[c]);

  std::vector<std::vector<double>> rows;
  size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ParseError("row " + std::to_string(row_number) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(header.size()));
    std::vector<double> features;
    features.reserve(header.size() - 1);
    for (size_t c = 0; c < cells.size(); ++c) {
      const double v = parse_cell(cells[c], row_number, header[c]);
      if (static_cast<int>(c) == label_col)
        ds.labels.push_back(v);
      else
        features.push_back(v);
    }
    rows.push_back(std::move(features));
  }
  if (rows.empty()) throw ParseError("no data rows in '" + path + "'");
  ds.features = Matrix::from_rows(rows);
  binarize_labels(ds.labels, schema);
  return ds;
}

void save_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (const auto& name : dataset.feature_names) out << name << ',';
  out << dataset.label_name << '\n';
  for (int r = 0; r < dataset.size(); ++r) {
    const auto row = dataset.features.row(r);
    for (double v : row) out << format_double(v) << ',';
    out << format_double(dataset.labels[r]) << '\n';
  }
}

Normalization fit_normalization(const Matrix& train, const std::vector<std::string>& names,
                                uint64_t seed) {
  const int n = train.rows();
  const int d = train.cols();
  if (n < 2) throw InvalidArgumentError("need at least two training rows");

  Normalization norm;
  Matrix standardized(n, 0);
  std::vector<std::vector<double>> kept_cols;
  for (int c = 0; c < d; ++c) {
    std::vector<double> col = train.column(c);
    const double mu = mean(col);
    double var = 0.0;
    for (double v : col) var += (v - mu) * (v - mu);
    const double sigma = std::sqrt(var / n);
    const std::string name = c < static_cast<int>(names.size()) ? names[c]
                                                                : "f" + std::to_string(c);
    if (sigma < 1e-12) {
      norm.dropped_features.push_back(name);
      continue;
    }
    norm.mean.push_back(mu);
    norm.stddev.push_back(sigma);
    norm.feature_names.push_back(name);
    norm.kept_columns.push_back(c);
    for (double& v : col) v = (v - mu) / sigma;
    kept_cols.push_back(std::move(col));
  }
  if (kept_cols.empty()) throw InvalidArgumentError("all features are constant");

  Matrix z(n, static_cast<int>(kept_cols.size()));
  for (int r = 0; r < n; ++r)
    for (size_t c = 0; c < kept_cols.size(); ++c) z(r, static_cast<int>(c)) = kept_cols[c][r];

  const double med = median_pairwise_distance(z, seed);
  if (!(med > 0.0)) throw NumericalError("median pairwise training distance is zero");
  norm.scale = 1.0 / med;
  return norm;
}

Matrix apply_normalization(const Normalization& norm, const Matrix& raw) {
  Matrix out(raw.rows(), static_cast<int>(norm.kept_columns.size()));
  for (int r = 0; r < raw.rows(); ++r) {
    for (size_t c = 0; c < norm.kept_columns.size(); ++c) {
      const double v = raw(r, norm.kept_columns[c]);
      out(r, static_cast<int>(c)) = (v - norm.mean[c]) / norm.stddev[c] * norm.scale;
    }
  }
  return out;
}

std::vector<double> normalize_point(const Normalization& norm, std::span<const double> raw) {
  std::vector<double> out(norm.kept_columns.size());
  for (size_t c = 0; c < norm.kept_columns.size(); ++c)
    out[c] = (raw[norm.kept_columns[c]] - norm.mean[c]) / norm.stddev[c] * norm.scale;
  return out;
}

std::vector<double> denormalize_point(const Normalization& norm, std::span<const double> scaled) {
  std::vector<double> out(scaled.size());
  for (size_t c = 0; c < scaled.size(); ++c)
    out[c] = scaled[c] / norm.scale * norm.stddev[c] + norm.mean[c];
  return out;
}

PreprocessResult preprocess(const Dataset& dataset, uint64_t seed) {
  const int n = dataset.size();
  if (n < 5) throw InvalidArgumentError("dataset too small to split");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed({seed, 0x73706c6974ULL}));
  rng.shuffle(order);

  const int n_val = std::max(1, n / 5);
  std::vector<int> val_idx(order.begin(), order.begin() + n_val);
  std::vector<int> train_idx(order.begin() + n_val, order.end());
  const int n_explain = std::min(300, n_val);
  std::vector<int> explain_idx(val_idx.begin(), val_idx.begin() + n_explain);

  const Matrix train_raw = dataset.features.take_rows(train_idx);
  Normalization norm =
      fit_normalization(train_raw, dataset.feature_names, mix_seed({seed, 0x6d6564ULL}));

  auto build = [&](const std::vector<int>& idx) {
    Dataset out;
    out.features = apply_normalization(norm, dataset.features.take_rows(idx));
    out.labels.reserve(idx.size());
    for (int i : idx) out.labels.push_back(dataset.labels[i]);
    out.feature_names = norm.feature_names;
    out.label_name = dataset.label_name;
    return out;
  };

  PreprocessResult result;
  result.train = build(train_idx);
  result.validation = build(val_idx);
  result.explain_set = build(explain_idx);
  result.normalization = std::move(norm);
  return result;
}

double median_pairwise_distance(const Matrix& points, uint64_t seed) {
  std::vector<int> idx(points.rows());
  std::iota(idx.begin(), idx.end(), 0);
  if (points.rows() > 2000) {
    Rng rng(mix_seed({seed, 0x64697374ULL}));
    rng.shuffle(idx);
    idx.resize(2000);
    std::sort(idx.begin(), idx.end());
  }
  const int m = static_cast<int>(idx.size());
  if (m < 2) throw InvalidArgumentError("need at least two points for pairwise distances");
  std::vector<double> dists;
  dists.reserve(static_cast<size_t>(m) * (m - 1) / 2);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      dists.push_back(std::sqrt(squared_distance(points.row(idx[a]), points.row(idx[b]))));
  return median(std::move(dists));
}

Dataset synthetic_two_moons(uint64_t seed, int n, double noise) {
  if (n < 4) throw InvalidArgumentError("need at least 4 points");
  Dataset ds;
  ds.feature_names = {"x0", "x1"};
  ds.features = Matrix(n, 2);
  ds.labels.resize(n);
  Rng rng(mix_seed({seed, 0x6d6f6f6eULL}));
  const int n_pos = n / 2;
  const double pi = 3.141592653589793;
  for (int i = 0; i < n; ++i) {
    const bool pos = i < n_pos;
    const int count = pos ? n_pos : n - n_pos;
    const int j = pos ? i : i - n_pos;
    const double t = pi * j / std::max(1, count - 1);
    double x0 = pos ? std::cos(t) : 1.0 - std::cos(t);
    double x1 = pos ? std::sin(t) : 0.5 - std::sin(t);
    x0 += noise * rng.normal();
    x1 += noise * rng.normal();
    ds.features(i, 0) = x0;
    ds.features(i, 1) = x1;
    ds.labels[i] = pos ? 1.0 : -1.0;
  }
  return ds;
}

Dataset synthetic_xor(uint64_t seed, int n, double noise) {
  if (n < 4) throw InvalidArgumentError("need at least 4 points");
  Dataset ds;
  ds.feature_names = {"x0", "x1"};
  ds.features = Matrix(n, 2);
  ds.labels.resize(n);
  Rng rng(mix_seed({seed, 0x786f72ULL}));
  static const double corners[4][2] = {{1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
  for (int i = 0; i < n; ++i) {
    const int c = i % 4;
    ds.features(i, 0) = corners[c][0] + noise * rng.normal();
    ds.features(i, 1) = corners[c][1] + noise * rng.normal();
    ds.labels[i] = c < 2 ? 1.0 : -1.0;
  }
  return ds;
}

Dataset synthetic_gaussians(uint64_t seed, int n, double noise) {
  if (n < 4) throw InvalidArgumentError("need at least 4 points");
  Dataset ds;
  ds.feature_names = {"x0", "x1"};
  ds.features = Matrix(n, 2);
  ds.labels.resize(n);
  Rng rng(mix_seed({seed, 0x67617573ULL}));
  for (int i = 0; i < n; ++i) {
    const bool pos = i % 2 == 0;
    const double cx = pos ? 2.0 : -2.0;
    ds.features(i, 0) = cx + noise * rng.normal();
    ds.features(i, 1) = (pos ? 1.0 : -1.0) + noise * rng.normal();
    ds.labels[i] = pos ? 1.0 : -1.0;
  }
  return ds;
}

}  // namespace distex

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/matrix.hpp"

namespace distex {

struct Dataset {
  Matrix features;
  std::vector<double> labels;  // +1/-1 for classification, real otherwise
  std::vector<std::string> feature_names;
  std::string label_name = "label";

  int size() const { return features.rows(); }
  int dim() const { return features.cols(); }
};

enum class LabelRule {
  auto_detect,  // two distinct values -> map; otherwise threshold at the median
  binary,       // values must already be +1/-1 (or exactly two values)
  quantile,     // +1 iff value >= the given quantile of the column
  none,         // keep raw values (regression targets)
};

struct CsvSchema {
  std::string label_column;
  LabelRule rule = LabelRule::auto_detect;
  double quantile = 0.5;
};

// Strict rectangular numeric CSV with a header row. Missing or non-numeric
// cells raise ParseError naming the row and column.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

void save_csv(const Dataset& dataset, const std::string& path);

// Per-feature standardization fitted on the training split plus one global
// rescale putting the median pairwise training distance at 1.
struct Normalization {
  std::vector<double> mean;  // per kept feature, in original column order
  std::vector<double> stddev;
  double scale = 1.0;
  std::vector<std::string> feature_names;      // kept features
  std::vector<std::string> dropped_features;   // constant columns
  std::vector<int> kept_columns;               // indices into the raw layout
};

Normalization fit_normalization(const Matrix& train, const std::vector<std::string>& names,
                                uint64_t seed);
Matrix apply_normalization(const Normalization& norm, const Matrix& raw);
std::vector<double> normalize_point(const Normalization& norm, std::span<const double> raw);
std::vector<double> denormalize_point(const Normalization& norm, std::span<const double> scaled);

struct PreprocessResult {
  Dataset train;
  Dataset validation;
  Dataset explain_set;  // subset of validation, at most 300 rows
  Normalization normalization;
};

// Seeded shuffle, 20% validation holdout with min(300, all) of it reserved
// for explanation, train-fitted standardization and the global median
// rescale applied to every split.
PreprocessResult preprocess(const Dataset& dataset, uint64_t seed);

// Exact for n <= 2000 rows, a seeded 2000-row subsample beyond that.
double median_pairwise_distance(const Matrix& points, uint64_t seed);

Dataset synthetic_two_moons(uint64_t seed, int n, double noise);
Dataset synthetic_xor(uint64_t seed, int n, double noise);
Dataset synthetic_gaussians(uint64_t seed, int n, double noise);

}  // namespace distex

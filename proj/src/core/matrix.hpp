#pragma once

#include <cassert>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "core/errors.hpp"

namespace distex {

// Dense row-major matrix of doubles. Rows are the natural unit (data
// points, support vectors); row(i) exposes a borrowed span.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw InvalidArgumentError("matrix dimensions must be nonnegative");
  }

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    for (size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<int>(rows[i].size()) != m.cols_)
        throw DimensionError("ragged rows in matrix construction");
      for (int j = 0; j < m.cols_; ++j) m(static_cast<int>(i), j) = rows[i][j];
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(int r, int c) {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }

  std::span<const double> row(int r) const {
    assert(r >= 0 && r < rows_);
    return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)};
  }
  std::span<double> row(int r) {
    assert(r >= 0 && r < rows_);
    return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)};
  }

  std::vector<double> column(int c) const {
    std::vector<double> out(rows_);
    for (int r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  Matrix take_rows(std::span<const int> idx) const {
    Matrix out(static_cast<int>(idx.size()), cols_);
    for (size_t i = 0; i < idx.size(); ++i) {
      auto src = row(idx[i]);
      auto dst = out.row(static_cast<int>(i));
      std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(std::span<const double> a) { return dot(a, a); }

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace distex

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace distex {

// Smooth maximum smax^g{v} = g^-1 log sum exp(g v), max-shifted so that
// gamma up to ~1e2 on squared-distance scores cannot overflow.
inline double smooth_max(std::span<const double> values, double gamma) {
  const double m = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : values) s += std::exp(gamma * (v - m));
  return m + std::log(s) / gamma;
}

inline double smooth_min(std::span<const double> values, double gamma) {
  const double m = *std::min_element(values.begin(), values.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : values) s += std::exp(-gamma * (v - m));
  return m - std::log(s) / gamma;
}

// softmax(beta * v), max-shifted; sums to 1.
inline std::vector<double> softmax(std::span<const double> values, double beta) {
  const double m = *std::max_element(values.begin(), values.end());
  std::vector<double> p(values.size());
  double total = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    p[i] = std::exp(beta * (values[i] - m));
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Unbiased (n-1) standard deviation.
inline double sample_stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Linear-interpolation quantile on a copy (R type 7). q in [0, 1].
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  const size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

}  // namespace distex

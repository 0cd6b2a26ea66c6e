#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// here recomputes expected values from first principles so that the checks
// stay decoupled from the library's own evaluation paths.

#include <cmath>
#include <functional>
#include <vector>

#include "core/lrp.hpp"
#include "core/matrix.hpp"
#include "core/models.hpp"
#include "core/neuralize.hpp"
#include "core/rng.hpp"

namespace distex::test {

// Two opposite support vectors on the x-axis: u+ = (1,0), u- = (-1,0),
// alpha = 1, gamma = 1.
inline SvmModel two_sv_fixture(double bias = 0.0) {
  return make_svm(Matrix::from_rows({{1.0, 0.0}, {-1.0, 0.0}}), {1.0, 1.0}, {1, -1}, 1.0, bias);
}

// 1-D points {+1: 1, 2} and {-1: -1, -2} in that order.
inline KnnModel knn_line_fixture(int k) {
  return make_knn(Matrix::from_rows({{1.0}, {2.0}, {-1.0}, {-2.0}}), {1, 1, -1, -1}, k);
}

// Central finite differences with step h.
inline std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double h = 1e-5) {
  std::vector<double> grad(x.size());
  std::vector<double> probe(x.begin(), x.end());
  for (size_t k = 0; k < x.size(); ++k) {
    const double keep = probe[k];
    probe[k] = keep + h;
    const double up = f(probe);
    probe[k] = keep - h;
    const double down = f(probe);
    probe[k] = keep;
    grad[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

inline double max_rel_error(std::span<const double> got, std::span<const double> want,
                            double floor = 1e-8) {
  double worst = 0.0;
  for (size_t k = 0; k < got.size(); ++k) {
    const double denom = std::max(std::abs(want[k]), floor);
    worst = std::max(worst, std::abs(got[k] - want[k]) / denom);
  }
  return worst;
}

// Direct double sum over all opposite-class pairs, reconstructing each
// pair's weight and midpoint from the stored points. Bias slots carry no
// weight vector and are skipped.
inline std::vector<double> brute_force_relevance(const NeuralizedNet& net,
                                                 std::span<const double> x,
                                                 const PoolingProbabilities& probs, double eta) {
  std::vector<double> relevance(net.dim(), 0.0);
  for (size_t si = 0; si < net.positive_pool.size(); ++si) {
    const auto ui = net.points.row(net.positive_pool[si]);
    for (size_t sj = 0; sj < net.negative_pool.size(); ++sj) {
      const auto uj = net.points.row(net.negative_pool[sj]);
      const double pp = probs.positive[si] * probs.negative[sj];
      for (int k = 0; k < net.dim(); ++k) {
        const double w = 2.0 * (ui[k] - uj[k]);
        const double m = 0.5 * (ui[k] + uj[k]);
        relevance[k] += (x[k] - eta * m) * w * pp;
      }
    }
  }
  return relevance;
}

// Random dense SVM with both classes present; gamma/bias drawn from the
// given candidates.
inline SvmModel random_svm(Rng& rng, int n, int d, double gamma, double bias) {
  Matrix points(n, d);
  for (auto& v : points.data()) v = rng.normal();
  std::vector<double> alphas(n);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    alphas[i] = 0.1 + rng.uniform() * 2.0;
    labels[i] = i < n / 2 ? 1 : -1;  // both classes guaranteed for n >= 2
  }
  return make_svm(std::move(points), std::move(alphas), std::move(labels), gamma, bias);
}

inline KnnModel random_knn(Rng& rng, int n, int d, int k) {
  Matrix points(n, d);
  for (auto& v : points.data()) v = rng.normal();
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i % 2 == 0 ? 1 : -1;
  return make_knn(std::move(points), std::move(labels), k);
}

inline Matrix random_probes(Rng& rng, int n, int d, double spread = 1.5) {
  Matrix probes(n, d);
  for (auto& v : probes.data()) v = spread * rng.normal();
  return probes;
}

}  // namespace distex::test

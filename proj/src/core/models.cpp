#include "core/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/errors.hpp"
#include "core/numeric.hpp"
#include "core/rng.hpp"

namespace distex {

namespace {

std::vector<double> cache_sq_norms(const Matrix& m) {
  std::vector<double> out(m.rows());
  for (int i = 0; i < m.rows(); ++i) out[i] = squared_norm(m.row(i));
  return out;
}

void check_dim(const Matrix& points, std::span<const double> x) {
  if (static_cast<int>(x.size()) != points.cols())
    throw DimensionError("input has " + std::to_string(x.size()) + " features, model expects " +
                         std::to_string(points.cols()));
}

// |x - u|^2 via the expanded form with cached |u|^2, clamped at zero
// against round-off.
inline double sq_dist_cached(std::span<const double> x, double x_sq, std::span<const double> u,
                             double u_sq) {
  const double d = x_sq - 2.0 * dot(x, u) + u_sq;
  return d > 0.0 ? d : 0.0;
}

void check_binary_labels(const std::vector<int>& labels) {
  bool pos = false, neg = false;
  for (int y : labels) {
    if (y == 1)
      pos = true;
    else if (y == -1)
      neg = true;
    else
      throw InvalidArgumentError("labels must be +1 or -1");
  }
  if (!pos || !neg) throw InvalidArgumentError("need at least one point of each class");
}

}  // namespace

SvmModel make_svm(Matrix support_vectors, std::vector<double> dual_coeffs,
                  std::vector<int> labels, double gamma, double bias,
                  std::vector<std::string> feature_names) {
  const size_t n = static_cast<size_t>(support_vectors.rows());
  if (dual_coeffs.size() != n || labels.size() != n)
    throw DimensionError("support vectors, coefficients and labels must align");
  if (n == 0) throw InvalidArgumentError("empty support vector set");
  if (gamma <= 0.0) throw InvalidArgumentError("gamma must be positive");
  for (double a : dual_coeffs)
    if (!(a > 0.0)) throw InvalidArgumentError("dual coefficients must be positive");
  check_binary_labels(labels);
  SvmModel m{std::move(support_vectors), std::move(dual_coeffs), std::move(labels),
             gamma,                      bias,                    std::move(feature_names),
             {}};
  m.sq_norms = cache_sq_norms(m.support_vectors);
  return m;
}

KnnModel make_knn(Matrix points, std::vector<int> labels, int k,
                  std::vector<std::string> feature_names) {
  const size_t n = static_cast<size_t>(points.rows());
  if (labels.size() != n) throw DimensionError("points and labels must align");
  if (k < 1 || k % 2 == 0) throw InvalidArgumentError("k must be odd and positive");
  if (k > static_cast<int>(n)) throw InvalidArgumentError("k exceeds the number of points");
  check_binary_labels(labels);
  const int q = (k + 1) / 2;
  const int n_pos = static_cast<int>(std::count(labels.begin(), labels.end(), 1));
  const int n_neg = static_cast<int>(n) - n_pos;
  if (n_pos < q || n_neg < q)
    throw InvalidArgumentError("need at least (k+1)/2 points of each class");
  KnnModel m{std::move(points), std::move(labels), k, std::move(feature_names), {}};
  m.sq_norms = cache_sq_norms(m.points);
  return m;
}

KrrModel make_krr(Matrix points, std::vector<double> coeffs, double gamma, double ridge,
                  std::vector<std::string> feature_names) {
  if (coeffs.size() != static_cast<size_t>(points.rows()))
    throw DimensionError("points and coefficients must align");
  if (gamma <= 0.0) throw InvalidArgumentError("gamma must be positive");
  if (ridge < 0.0) throw InvalidArgumentError("ridge must be nonnegative");
  KrrModel m{std::move(points), std::move(coeffs), gamma, ridge, std::move(feature_names), {}};
  m.sq_norms = cache_sq_norms(m.points);
  return m;
}

double svm_decision(const SvmModel& model, std::span<const double> x) {
  check_dim(model.support_vectors, x);
  const double x_sq = squared_norm(x);
  double f = model.bias;
  for (int l = 0; l < model.support_vectors.rows(); ++l) {
    const double d2 = sq_dist_cached(x, x_sq, model.support_vectors.row(l), model.sq_norms[l]);
    f += model.labels[l] * model.dual_coeffs[l] * std::exp(-model.gamma * d2);
  }
  return f;
}

std::vector<double> svm_gradient(const SvmModel& model, std::span<const double> x) {
  check_dim(model.support_vectors, x);
  const double x_sq = squared_norm(x);
  std::vector<double> grad(x.size(), 0.0);
  for (int l = 0; l < model.support_vectors.rows(); ++l) {
    const auto u = model.support_vectors.row(l);
    const double d2 = sq_dist_cached(x, x_sq, u, model.sq_norms[l]);
    const double w = model.labels[l] * model.dual_coeffs[l] * std::exp(-model.gamma * d2) *
                     (-2.0 * model.gamma);
    for (size_t j = 0; j < x.size(); ++j) grad[j] += w * (x[j] - u[j]);
  }
  return grad;
}

double knn_decision(const KnnModel& model, std::span<const double> x) {
  check_dim(model.points, x);
  const double x_sq = squared_norm(x);
  const int n = model.points.rows();
  std::vector<std::pair<double, int>> dist(n);
  for (int l = 0; l < n; ++l)
    dist[l] = {sq_dist_cached(x, x_sq, model.points.row(l), model.sq_norms[l]), l};
  // ties at the k-th rank break toward the lower training index
  std::nth_element(dist.begin(), dist.begin() + (model.k - 1), dist.end());
  std::sort(dist.begin(), dist.begin() + model.k);
  double votes = 0.0;
  for (int t = 0; t < model.k; ++t) votes += model.labels[dist[t].second];
  return votes;
}

double krr_decision(const KrrModel& model, std::span<const double> x) {
  check_dim(model.points, x);
  const double x_sq = squared_norm(x);
  double f = 0.0;
  for (int l = 0; l < model.points.rows(); ++l) {
    const double d2 = sq_dist_cached(x, x_sq, model.points.row(l), model.sq_norms[l]);
    f += model.coeffs[l] * std::exp(-model.gamma * d2);
  }
  return f;
}

std::vector<double> krr_gradient(const KrrModel& model, std::span<const double> x) {
  check_dim(model.points, x);
  const double x_sq = squared_norm(x);
  std::vector<double> grad(x.size(), 0.0);
  for (int l = 0; l < model.points.rows(); ++l) {
    const auto u = model.points.row(l);
    const double d2 = sq_dist_cached(x, x_sq, u, model.sq_norms[l]);
    const double w = model.coeffs[l] * std::exp(-model.gamma * d2) * (-2.0 * model.gamma);
    for (size_t j = 0; j < x.size(); ++j) grad[j] += w * (x[j] - u[j]);
  }
  return grad;
}

SvmModel krr_to_svm(const KrrModel& model) {
  std::vector<int> keep;
  for (int l = 0; l < model.points.rows(); ++l)
    if (model.coeffs[l] != 0.0) keep.push_back(l);
  if (keep.empty()) throw InvalidArgumentError("all coefficients are zero");
  std::vector<double> alphas;
  std::vector<int> labels;
  alphas.reserve(keep.size());
  labels.reserve(keep.size());
  for (int l : keep) {
    alphas.push_back(std::abs(model.coeffs[l]));
    labels.push_back(model.coeffs[l] > 0.0 ? 1 : -1);
  }
  if (std::count(labels.begin(), labels.end(), 1) == 0 ||
      std::count(labels.begin(), labels.end(), -1) == 0)
    throw InvalidArgumentError(
        "coefficients all share one sign; no opposite-class pool exists");
  return make_svm(model.points.take_rows(keep), std::move(alphas), std::move(labels),
                  model.gamma, 0.0, model.feature_names);
}

// ---------------------------------------------------------------------------
// SMO trainer (two-variable working set, maximal violating pair).
//
// Dual: min 1/2 a^T Q a - e^T a, 0 <= a <= C, y^T a = 0, with
// Q_ij = y_i y_j K_ij. Gradient G = Q a - e is kept incrementally.
// ---------------------------------------------------------------------------

namespace {

class KernelCache {
 public:
  KernelCache(const Matrix& data, double gamma) : data_(data), gamma_(gamma) {
    sq_norms_ = cache_sq_norms(data);
    const int n = data.rows();
    // full matrix for desk-scale problems, rows on demand beyond that
    if (static_cast<long>(n) * n <= 16'000'000L) {
      full_.assign(static_cast<size_t>(n) * n, 0.0);
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          const double k = kernel(i, j);
          full_[static_cast<size_t>(i) * n + j] = k;
          full_[static_cast<size_t>(j) * n + i] = k;
        }
      }
    }
  }

  bool cached() const { return !full_.empty(); }

  const double* row(int i) const { return full_.data() + static_cast<size_t>(i) * data_.rows(); }

  double kernel(int i, int j) const {
    const double d2 =
        sq_dist_cached(data_.row(i), sq_norms_[i], data_.row(j), sq_norms_[j]);
    return std::exp(-gamma_ * d2);
  }

  double at(int i, int j) const {
    return cached() ? full_[static_cast<size_t>(i) * data_.rows() + j] : kernel(i, j);
  }

 private:
  const Matrix& data_;
  double gamma_;
  std::vector<double> sq_norms_;
  std::vector<double> full_;
};

}  // namespace

SvmModel train_svm(const Matrix& data, const std::vector<int>& labels, double gamma, double C,
                   double tolerance) {
  const int n = data.rows();
  if (static_cast<int>(labels.size()) != n) throw DimensionError("data and labels must align");
  if (C <= 0.0) throw InvalidArgumentError("C must be positive");
  if (gamma <= 0.0) throw InvalidArgumentError("gamma must be positive");
  check_binary_labels(labels);

  KernelCache K(data, gamma);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // G = Q a - e, a = 0

  const long max_iter = 100'000L * static_cast<long>(n);
  long iter = 0;
  double gap = std::numeric_limits<double>::infinity();

  for (; iter < max_iter; ++iter) {
    // maximal violating pair
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    int i = -1, j = -1;
    for (int t = 0; t < n; ++t) {
      const double v = -labels[t] * grad[t];
      const bool in_up = (labels[t] == 1 && alpha[t] < C) || (labels[t] == -1 && alpha[t] > 0);
      const bool in_low = (labels[t] == -1 && alpha[t] < C) || (labels[t] == 1 && alpha[t] > 0);
      if (in_up && v > m_up) {
        m_up = v;
        i = t;
      }
      if (in_low && v < m_low) {
        m_low = v;
        j = t;
      }
    }
    gap = m_up - m_low;
    if (gap < tolerance || i < 0 || j < 0 || i == j) break;

    // two-variable subproblem along the equality constraint
    const double kii = K.at(i, i), kjj = K.at(j, j), kij = K.at(i, j);
    double eta = kii + kjj - 2.0 * kij;
    if (eta <= 1e-12) eta = 1e-12;
    const double yi = labels[i], yj = labels[j];
    // unconstrained step on alpha_i in the (a_i, a_j) plane
    const double delta = (m_up - m_low) / eta;
    double ai = alpha[i] + yi * delta;
    // clip to the box for both variables; a_j moves by -s*(ai - alpha_i)
    const double s = yi * yj;
    double lo = 0.0, hi = C;
    // bounds on ai induced by 0 <= a_j <= C
    if (s > 0) {
      lo = std::max(lo, alpha[i] + alpha[j] - C);
      hi = std::min(hi, alpha[i] + alpha[j]);
    } else {
      lo = std::max(lo, alpha[i] - alpha[j]);
      hi = std::min(hi, C + alpha[i] - alpha[j]);
    }
    ai = std::clamp(ai, lo, hi);
    double aj = alpha[j] - s * (ai - alpha[i]);
    // snap to exact bounds so near-bound duals cannot pin the working set
    const double snap = 1e-12 * C;
    if (ai < snap) ai = 0.0;
    if (ai > C - snap) ai = C;
    if (aj < snap) aj = 0.0;
    if (aj > C - snap) aj = C;
    const double di = ai - alpha[i], dj = aj - alpha[j];
    if (std::abs(di) < 1e-15 && std::abs(dj) < 1e-15) break;

    if (K.cached()) {
      const double* ki = K.row(i);
      const double* kj = K.row(j);
      for (int t = 0; t < n; ++t)
        grad[t] += labels[t] * (yi * di * ki[t] + yj * dj * kj[t]);
    } else {
      for (int t = 0; t < n; ++t)
        grad[t] += labels[t] * (yi * di * K.kernel(i, t) + yj * dj * K.kernel(j, t));
    }
    alpha[i] = ai;
    alpha[j] = aj;
  }

  if (iter >= max_iter)
    throw NumericalError("SMO did not converge; KKT violation " + std::to_string(gap));

  // bias from the free support vectors, midpoint fallback otherwise
  double m_up = -std::numeric_limits<double>::infinity();
  double m_low = std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  int free_count = 0;
  for (int t = 0; t < n; ++t) {
    const double v = -labels[t] * grad[t];
    if (alpha[t] > 0.0 && alpha[t] < C) {
      free_sum += v;
      ++free_count;
    }
    const bool in_up = (labels[t] == 1 && alpha[t] < C) || (labels[t] == -1 && alpha[t] > 0);
    const bool in_low = (labels[t] == -1 && alpha[t] < C) || (labels[t] == 1 && alpha[t] > 0);
    if (in_up) m_up = std::max(m_up, v);
    if (in_low) m_low = std::min(m_low, v);
  }
  const double theta = free_count > 0 ? free_sum / free_count : (m_up + m_low) / 2.0;

  std::vector<int> keep;
  for (int t = 0; t < n; ++t)
    if (alpha[t] > 1e-8) keep.push_back(t);
  if (keep.empty()) throw NumericalError("no support vectors above the pruning threshold");
  std::vector<double> sv_alpha;
  std::vector<int> sv_labels;
  for (int t : keep) {
    sv_alpha.push_back(alpha[t]);
    sv_labels.push_back(labels[t]);
  }
  const bool pos = std::count(sv_labels.begin(), sv_labels.end(), 1) > 0;
  const bool neg = std::count(sv_labels.begin(), sv_labels.end(), -1) > 0;
  if (!pos || !neg) throw NumericalError("degenerate solution: single-class support set");
  return make_svm(data.take_rows(keep), std::move(sv_alpha), std::move(sv_labels), gamma, theta);
}

KrrModel train_krr(const Matrix& data, const std::vector<double>& targets, double gamma,
                   double ridge) {
  const int n = data.rows();
  if (static_cast<int>(targets.size()) != n) throw DimensionError("data and targets must align");
  if (ridge < 0.0) throw InvalidArgumentError("ridge must be nonnegative");
  if (gamma <= 0.0) throw InvalidArgumentError("gamma must be positive");

  const auto sq = cache_sq_norms(data);
  std::vector<double> A(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double d2 = sq_dist_cached(data.row(i), sq[i], data.row(j), sq[j]);
      const double k = std::exp(-gamma * d2) + (i == j ? ridge : 0.0);
      A[static_cast<size_t>(i) * n + j] = k;
      A[static_cast<size_t>(j) * n + i] = k;
    }
  }

  // in-place Cholesky A = L L^T; a non-positive pivot means the kernel
  // matrix is singular at ridge 0
  for (int c = 0; c < n; ++c) {
    double pivot = A[static_cast<size_t>(c) * n + c];
    for (int k = 0; k < c; ++k) {
      const double l = A[static_cast<size_t>(c) * n + k];
      pivot -= l * l;
    }
    if (pivot <= 1e-14)
      throw NumericalError("kernel system is singular; increase the ridge term");
    const double lcc = std::sqrt(pivot);
    A[static_cast<size_t>(c) * n + c] = lcc;
    for (int r = c + 1; r < n; ++r) {
      double v = A[static_cast<size_t>(r) * n + c];
      for (int k = 0; k < c; ++k)
        v -= A[static_cast<size_t>(r) * n + k] * A[static_cast<size_t>(c) * n + k];
      A[static_cast<size_t>(r) * n + c] = v / lcc;
    }
  }

  // forward then backward substitution
  std::vector<double> coeffs(targets);
  for (int r = 0; r < n; ++r) {
    double v = coeffs[r];
    for (int k = 0; k < r; ++k) v -= A[static_cast<size_t>(r) * n + k] * coeffs[k];
    coeffs[r] = v / A[static_cast<size_t>(r) * n + r];
  }
  for (int r = n - 1; r >= 0; --r) {
    double v = coeffs[r];
    for (int k = r + 1; k < n; ++k) v -= A[static_cast<size_t>(k) * n + r] * coeffs[k];
    coeffs[r] = v / A[static_cast<size_t>(r) * n + r];
  }
  return make_krr(data, std::move(coeffs), gamma, ridge);
}

ModelKind model_kind(const Model& model) {
  if (std::holds_alternative<SvmModel>(model)) return ModelKind::svm;
  if (std::holds_alternative<KnnModel>(model)) return ModelKind::knn;
  return ModelKind::krr;
}

int model_dim(const Model& model) {
  return std::visit(
      [](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, KnnModel>)
          return m.points.cols();
        else if constexpr (std::is_same_v<std::decay_t<decltype(m)>, KrrModel>)
          return m.points.cols();
        else
          return m.support_vectors.cols();
      },
      model);
}

double model_decision(const Model& model, std::span<const double> x) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SvmModel>) return svm_decision(m, x);
        if constexpr (std::is_same_v<T, KnnModel>) return knn_decision(m, x);
        if constexpr (std::is_same_v<T, KrrModel>) return krr_decision(m, x);
      },
      model);
}

std::vector<double> model_gradient(const Model& model, std::span<const double> x) {
  return std::visit(
      [&](const auto& m) -> std::vector<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SvmModel>) return svm_gradient(m, x);
        if constexpr (std::is_same_v<T, KrrModel>) return krr_gradient(m, x);
        if constexpr (std::is_same_v<T, KnnModel>)
          throw InapplicableError("gradient-based explanations are inapplicable to knn models");
      },
      model);
}

Model train_model(const Matrix& data, const std::vector<double>& labels, const TrainSpec& spec) {
  if (spec.kind == ModelKind::krr) return train_krr(data, labels, spec.gamma, spec.ridge);
  std::vector<int> int_labels(labels.size());
  for (size_t i = 0; i < labels.size(); ++i)
    int_labels[i] = labels[i] >= 0.0 ? 1 : -1;
  if (spec.kind == ModelKind::svm) return train_svm(data, int_labels, spec.gamma, spec.C);
  return make_knn(data, std::move(int_labels), spec.k);
}

double cross_val_score(const Matrix& data, const std::vector<double>& labels,
                       const TrainSpec& spec, int folds, uint64_t seed) {
  const int n = data.rows();
  if (folds < 2) throw InvalidArgumentError("cross-validation needs at least 2 folds");
  if (n < folds) throw InvalidArgumentError("fewer points than folds");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed({seed, 0x63763132ULL}));
  rng.shuffle(order);

  double score_sum = 0.0;
  long counted = 0;
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train_idx, test_idx;
    for (int i = 0; i < n; ++i)
      (i % folds == f ? test_idx : train_idx).push_back(order[i]);
    Matrix train_x = data.take_rows(train_idx);
    std::vector<double> train_y;
    train_y.reserve(train_idx.size());
    for (int i : train_idx) train_y.push_back(labels[i]);
    // a fold can lose one class or shrink below k; skip it rather than fail
    Model m;
    try {
      m = train_model(train_x, train_y, spec);
    } catch (const Error&) {
      continue;
    }
    for (int i : test_idx) {
      const double pred = model_decision(m, data.row(i));
      if (spec.kind == ModelKind::krr) {
        const double err = pred - labels[i];
        score_sum -= err * err;
      } else {
        score_sum += ((pred >= 0.0) == (labels[i] >= 0.0)) ? 1.0 : 0.0;
      }
      ++counted;
    }
  }
  if (counted == 0) throw NumericalError("all cross-validation folds failed to train");
  return score_sum / static_cast<double>(counted);
}

}  // namespace distex

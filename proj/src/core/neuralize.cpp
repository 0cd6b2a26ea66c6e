#include "core/neuralize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"
#include "core/numeric.hpp"

namespace distex {

namespace {

void check_dim(const NeuralizedNet& net, std::span<const double> x) {
  if (static_cast<int>(x.size()) != net.dim())
    throw DimensionError("input has " + std::to_string(x.size()) + " features, net expects " +
                         std::to_string(net.dim()));
}

// slot index of the q-th largest value, ties toward the lower slot index
int rank_select_desc(std::span<const double> values, int q) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::nth_element(order.begin(), order.begin() + (q - 1), order.end(), [&](int a, int b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return a < b;
  });
  return order[q - 1];
}

int rank_select_asc(std::span<const double> values, int q) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::nth_element(order.begin(), order.begin() + (q - 1), order.end(), [&](int a, int b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return a < b;
  });
  return order[q - 1];
}

}  // namespace

PairParams pair_params(const NeuralizedNet& net, int i, int j) {
  const auto ui = net.points.row(i);
  const auto uj = net.points.row(j);
  PairParams p;
  p.weight.resize(net.dim());
  p.midpoint.resize(net.dim());
  for (int k = 0; k < net.dim(); ++k) {
    p.weight[k] = 2.0 * (ui[k] - uj[k]);
    p.midpoint[k] = 0.5 * (ui[k] + uj[k]);
  }
  p.bias = net.log_coeffs[i] - net.log_coeffs[j];
  return p;
}

NeuralizedNet neuralize_svm(const SvmModel& model) {
  NeuralizedNet net;
  net.points = model.support_vectors;
  net.sq_norms = model.sq_norms;
  net.feature_names = model.feature_names;
  net.pool_kind = PoolKind::smooth;
  net.gamma = model.gamma;
  const int n = model.support_vectors.rows();
  net.log_coeffs.resize(n);
  for (int l = 0; l < n; ++l) {
    net.log_coeffs[l] = std::log(model.dual_coeffs[l]) / model.gamma;
    (model.labels[l] == 1 ? net.positive_pool : net.negative_pool).push_back(l);
  }
  if (net.positive_pool.empty() || net.negative_pool.empty())
    throw InvalidArgumentError("neuralization needs support vectors of both classes");
  if (model.bias != 0.0) {
    net.has_bias = true;
    net.bias_in_positive = model.bias > 0.0;
    net.bias_score = std::log(std::abs(model.bias)) / model.gamma;
  }
  return net;
}

NeuralizedNet neuralize_knn(const KnnModel& model) {
  NeuralizedNet net;
  net.points = model.points;
  net.sq_norms = model.sq_norms;
  net.feature_names = model.feature_names;
  net.pool_kind = PoolKind::ranked;
  net.rank_q = model.q();
  net.log_coeffs.assign(model.points.rows(), 0.0);
  for (int l = 0; l < model.points.rows(); ++l)
    (model.labels[l] == 1 ? net.positive_pool : net.negative_pool).push_back(l);
  if (static_cast<int>(net.positive_pool.size()) < net.rank_q ||
      static_cast<int>(net.negative_pool.size()) < net.rank_q)
    throw InvalidArgumentError("ranked pooling needs at least q points in each class");
  return net;
}

ForwardTrace forward(const NeuralizedNet& net, std::span<const double> x) {
  check_dim(net, x);
  ForwardTrace trace;
  const int n = net.points.rows();
  trace.point_scores.resize(n);
  for (int l = 0; l < n; ++l)
    trace.point_scores[l] = -squared_distance(x, net.points.row(l)) + net.log_coeffs[l];

  trace.positive_values.reserve(net.positive_slots());
  for (int i : net.positive_pool) trace.positive_values.push_back(trace.point_scores[i]);
  if (net.has_bias && net.bias_in_positive) trace.positive_values.push_back(net.bias_score);

  if (net.pool_kind == PoolKind::smooth) {
    trace.positive_pooled = smooth_max(trace.positive_values, net.gamma);
  } else {
    trace.positive_selected = rank_select_desc(trace.positive_values, net.rank_q);
    trace.positive_pooled = trace.positive_values[trace.positive_selected];
  }

  // h_j = pool over i of z_ij = (pooled positive score) - s_j; the
  // subtraction commutes with both pool kinds
  trace.negative_values.reserve(net.negative_slots());
  for (int j : net.negative_pool)
    trace.negative_values.push_back(trace.positive_pooled - trace.point_scores[j]);
  if (net.has_bias && !net.bias_in_positive)
    trace.negative_values.push_back(trace.positive_pooled - net.bias_score);

  if (net.pool_kind == PoolKind::smooth) {
    trace.g = smooth_min(trace.negative_values, net.gamma);
  } else {
    trace.negative_selected = rank_select_asc(trace.negative_values, net.rank_q);
    trace.g = trace.negative_values[trace.negative_selected];
  }
  return trace;
}

std::vector<double> net_gradient(const NeuralizedNet& net, std::span<const double> x) {
  if (net.pool_kind != PoolKind::smooth)
    throw InapplicableError("gradient-based explanations are inapplicable to ranked pooling");
  check_dim(net, x);
  const ForwardTrace trace = forward(net, x);

  // g = smax_pos - smax over s_j of the negative side; both smooth maxima
  // differentiate into softmax-weighted sums of ds_l/dx = 2(u_l - x), with
  // the bias slot contributing zero gradient but full softmax mass.
  const auto p_pos = softmax(trace.positive_values, net.gamma);
  std::vector<double> neg_scores;
  neg_scores.reserve(net.negative_slots());
  for (int j : net.negative_pool) neg_scores.push_back(trace.point_scores[j]);
  if (net.has_bias && !net.bias_in_positive) neg_scores.push_back(net.bias_score);
  const auto p_neg = softmax(neg_scores, net.gamma);

  std::vector<double> grad(x.size(), 0.0);
  double real_mass_pos = 0.0, real_mass_neg = 0.0;
  for (size_t s = 0; s < net.positive_pool.size(); ++s) {
    const auto u = net.points.row(net.positive_pool[s]);
    for (size_t k = 0; k < x.size(); ++k) grad[k] += p_pos[s] * 2.0 * u[k];
    real_mass_pos += p_pos[s];
  }
  for (size_t s = 0; s < net.negative_pool.size(); ++s) {
    const auto u = net.points.row(net.negative_pool[s]);
    for (size_t k = 0; k < x.size(); ++k) grad[k] -= p_neg[s] * 2.0 * u[k];
    real_mass_neg += p_neg[s];
  }
  for (size_t k = 0; k < x.size(); ++k)
    grad[k] -= 2.0 * x[k] * (real_mass_pos - real_mass_neg);
  return grad;
}

SignReport sign_equivalence_check(const Model& model, const NeuralizedNet& net,
                                  const Matrix& probes, double dead_zone) {
  SignReport report;
  for (int r = 0; r < probes.rows(); ++r) {
    const auto x = probes.row(r);
    const double f = model_decision(model, x);
    if (std::abs(f) <= dead_zone) {
      ++report.skipped;
      continue;
    }
    ++report.checked;
    const double g = forward(net, x).g;
    const int sf = f > 0.0 ? 1 : -1;
    const int sg = g > 0.0 ? 1 : (g < 0.0 ? -1 : 0);
    if (sf != sg) ++report.mismatches;
  }
  return report;
}

}  // namespace distex

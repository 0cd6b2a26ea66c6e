#include "core/lrp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"
#include "core/numeric.hpp"

namespace distex {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Uniform probabilities over the band of ranks [q-kappa, q+kappa] under the
// given ordering (asc: true ranks smallest-first). Value ties at the band
// boundary are pulled in, so the band may exceed 2*kappa+1 slots.
std::vector<double> band_probabilities(std::span<const double> values, int q, int kappa,
                                       bool ascending) {
  const int n = static_cast<int>(values.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (values[a] != values[b]) return ascending ? values[a] < values[b] : values[a] > values[b];
    return a < b;
  });
  const int lo = std::max(1, q - kappa);
  const int hi = std::min(n, q + kappa);
  const double v_lo = values[order[lo - 1]];
  const double v_hi = values[order[hi - 1]];
  std::vector<double> p(n, 0.0);
  int count = 0;
  for (int s = 0; s < n; ++s) {
    const bool in_band = ascending ? (values[s] >= v_lo && values[s] <= v_hi)
                                   : (values[s] <= v_lo && values[s] >= v_hi);
    if (in_band) {
      p[s] = 1.0;
      ++count;
    }
  }
  for (double& v : p) v /= count;
  return p;
}

}  // namespace

LrpHyperparams heuristic_params(const SvmModel& model) {
  LrpHyperparams p;
  p.eta = clamp01(0.4 * std::log10(model.gamma) + 0.4);
  p.beta = model.gamma;
  p.kappa = 0;
  return p;
}

LrpHyperparams heuristic_params(const KnnModel& model) {
  LrpHyperparams p;
  p.eta = 0.8;
  p.beta = 1.0;
  p.kappa = (model.k - 1) / 2;
  return p;
}

LrpHyperparams heuristic_params(const KrrModel& model) {
  LrpHyperparams p;
  p.eta = clamp01(0.4 * std::log10(model.gamma) + 0.4);
  p.beta = model.gamma;
  p.kappa = 0;
  return p;
}

LrpHyperparams heuristic_params(const Model& model) {
  return std::visit([](const auto& m) { return heuristic_params(m); }, model);
}

void validate_params(const NeuralizedNet& net, const LrpHyperparams& params) {
  if (!(params.eta >= 0.0 && params.eta <= 1.0))
    throw InvalidArgumentError("eta must lie in [0, 1]");
  if (net.pool_kind == PoolKind::smooth && !(params.beta > 0.0))
    throw InvalidArgumentError("beta must be positive");
  if (net.pool_kind == PoolKind::ranked && params.kappa < 0)
    throw InvalidArgumentError("kappa must be nonnegative");
}

PoolingProbabilities pooling_probabilities_smooth(const NeuralizedNet& net,
                                                  const ForwardTrace& trace, double beta) {
  if (net.pool_kind != PoolKind::smooth)
    throw InvalidArgumentError("smooth probabilities need smooth pooling");
  if (!(beta > 0.0)) throw InvalidArgumentError("beta must be positive");
  PoolingProbabilities probs;
  probs.positive = softmax(trace.positive_values, beta);
  // softargmin over the pooled values
  std::vector<double> neg(trace.negative_values.size());
  for (size_t s = 0; s < neg.size(); ++s) neg[s] = -trace.negative_values[s];
  probs.negative = softmax(neg, beta);
  return probs;
}

PoolingProbabilities pooling_probabilities_ranked(const NeuralizedNet& net,
                                                  const ForwardTrace& trace, int kappa) {
  if (net.pool_kind != PoolKind::ranked)
    throw InvalidArgumentError("banded probabilities need ranked pooling");
  if (kappa < 0) throw InvalidArgumentError("kappa must be nonnegative");
  PoolingProbabilities probs;
  // negative side: h_j ranked ascending around rank q
  probs.negative = band_probabilities(trace.negative_values, net.rank_q, kappa, true);
  // positive side: z_{i,j*} ranked descending; the ordering over i is the
  // same for every j, so the factorized scores rank identically
  probs.positive = band_probabilities(trace.positive_values, net.rank_q, kappa, false);
  return probs;
}

PoolingProbabilities pooling_probabilities(const NeuralizedNet& net, const ForwardTrace& trace,
                                           const LrpHyperparams& params) {
  return net.pool_kind == PoolKind::smooth
             ? pooling_probabilities_smooth(net, trace, params.beta)
             : pooling_probabilities_ranked(net, trace, params.kappa);
}

std::vector<double> explain_fast_path(const NeuralizedNet& net, std::span<const double> x,
                                      const PoolingProbabilities& probs, double eta) {
  const int d = net.dim();
  if (static_cast<int>(x.size()) != d) throw DimensionError("input dimension mismatch");

  // probability-weighted first and second moments of each pool; the bias
  // slot (when present) is excluded, leaving sub-unit pool masses
  std::vector<double> u_pos(d, 0.0), u_neg(d, 0.0), u2_pos(d, 0.0), u2_neg(d, 0.0);
  double mass_pos = 0.0, mass_neg = 0.0;
  for (size_t s = 0; s < net.positive_pool.size(); ++s) {
    const double p = probs.positive[s];
    const auto u = net.points.row(net.positive_pool[s]);
    mass_pos += p;
    for (int k = 0; k < d; ++k) {
      u_pos[k] += p * u[k];
      u2_pos[k] += p * u[k] * u[k];
    }
  }
  for (size_t s = 0; s < net.negative_pool.size(); ++s) {
    const double p = probs.negative[s];
    const auto u = net.points.row(net.negative_pool[s]);
    mass_neg += p;
    for (int k = 0; k < d; ++k) {
      u_neg[k] += p * u[k];
      u2_neg[k] += p * u[k] * u[k];
    }
  }

  // E_eta = (1-eta) E_0 + eta E_1 with
  //   E_0 = x (.) sum p_i p_j w_ij
  //   E_1 = E_0 - sum p_i p_j m_ij (.) w_ij
  std::vector<double> relevance(d);
  for (int k = 0; k < d; ++k) {
    const double e0 = x[k] * 2.0 * (mass_neg * u_pos[k] - mass_pos * u_neg[k]);
    const double e1 = e0 - (mass_neg * u2_pos[k] - mass_pos * u2_neg[k]);
    relevance[k] = (1.0 - eta) * e0 + eta * e1;
  }
  return relevance;
}

Explanation explain(const NeuralizedNet& net, std::span<const double> x,
                    const LrpHyperparams& params) {
  validate_params(net, params);
  Explanation out;
  const ForwardTrace trace = forward(net, x);
  out.g_value = trace.g;
  out.probabilities = pooling_probabilities(net, trace, params);
  out.relevance = explain_fast_path(net, x, out.probabilities, params.eta);
  out.params = params;
  return out;
}

}  // namespace distex

#pragma once

#include <span>
#include <vector>

#include "core/neuralize.hpp"

namespace distex {

struct LrpHyperparams {
  double eta = 0.5;  // reference-point interpolation in [0, 1]
  double beta = 1.0; // smooth pooling stiffness, > 0
  int kappa = 0;     // ranked band half-width, >= 0
};

// Model-scale defaults: eta = median{0, 0.4 log10(gamma) + 0.4, 1} and
// beta = gamma for the SVM (assumes unit median pairwise distance);
// eta = 0.8 and kappa = (k-1)/2 for KNN.
LrpHyperparams heuristic_params(const SvmModel& model);
LrpHyperparams heuristic_params(const KnnModel& model);
LrpHyperparams heuristic_params(const KrrModel& model);
LrpHyperparams heuristic_params(const Model& model);

// Per-slot redistribution weights mirroring the forward pooling; each
// vector sums to 1 and includes the bias slot when present.
struct PoolingProbabilities {
  std::vector<double> positive;
  std::vector<double> negative;
};

// Smooth pooling: softargmax over the factorized positive scores (valid for
// every j) and softargmin over the pooled h_j, both with stiffness beta.
PoolingProbabilities pooling_probabilities_smooth(const NeuralizedNet& net,
                                                  const ForwardTrace& trace, double beta);

// Ranked pooling: uniform mass over the rank band [q-kappa, q+kappa],
// clipped to the pool and widened to include value ties at its boundary.
PoolingProbabilities pooling_probabilities_ranked(const NeuralizedNet& net,
                                                  const ForwardTrace& trace, int kappa);

PoolingProbabilities pooling_probabilities(const NeuralizedNet& net, const ForwardTrace& trace,
                                           const LrpHyperparams& params);

struct Explanation {
  std::vector<double> relevance;
  double g_value = 0.0;
  PoolingProbabilities probabilities;
  LrpHyperparams params;
};

// Feature relevance sum_ij p_i p_j (x - eta m_ij) (.) w_ij computed in time
// linear in the pool sizes; the bias slot keeps its probability mass but
// contributes no feature relevance.
std::vector<double> explain_fast_path(const NeuralizedNet& net, std::span<const double> x,
                                      const PoolingProbabilities& probs, double eta);

Explanation explain(const NeuralizedNet& net, std::span<const double> x,
                    const LrpHyperparams& params);

void validate_params(const NeuralizedNet& net, const LrpHyperparams& params);

}  // namespace distex

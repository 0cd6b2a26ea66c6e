#pragma once

#include <span>
#include <string>
#include <vector>

#include "core/matrix.hpp"
#include "core/models.hpp"

namespace distex {

enum class PoolKind { smooth, ranked };

// Three-layer rewrite of a distance-based model: linear detection units
// indexed by opposite-class pairs, a (smooth or ranked) max pool over the
// positive side and a (smooth or ranked) min pool over the negative side.
//
// Detection units are stored factorized per point rather than per pair:
// with the per-point score
//
//   s_l(x) = -|x - u_l|^2 + log_coeff_l,
//
// every pairwise activation is z_ij = s_i - s_j, which equals
// (x - m_ij)^T w_ij + b_ij for w_ij = 2(u_i - u_j), m_ij = (u_i + u_j)/2
// and b_ij = log_coeff_i - log_coeff_j. This keeps memory and forward cost
// linear in the number of points.
//
// A nonzero SVM offset enters as a virtual unit at the constant squared
// distance -log|theta|/gamma (so exp(gamma * s_0) = |theta|), pooled with
// the positive units when theta > 0 and with the negative units otherwise.
// With that convention g(x) and f(x) have the same sign for every theta.
struct NeuralizedNet {
  Matrix points;                   // source points (support vectors / training data)
  std::vector<double> log_coeffs;  // log(alpha_l)/gamma for SVM, 0 for KNN
  std::vector<int> positive_pool;  // indices into points
  std::vector<int> negative_pool;
  PoolKind pool_kind = PoolKind::smooth;
  double gamma = 1.0;  // smooth pooling stiffness (unused when ranked)
  int rank_q = 1;      // ranked pooling order (unused when smooth)
  bool has_bias = false;
  double bias_score = 0.0;  // s_0 = log|theta|/gamma
  bool bias_in_positive = true;
  std::vector<std::string> feature_names;
  std::vector<double> sq_norms;  // cached |u_l|^2

  int dim() const { return points.cols(); }
  int positive_slots() const {
    return static_cast<int>(positive_pool.size()) + (has_bias && bias_in_positive ? 1 : 0);
  }
  int negative_slots() const {
    return static_cast<int>(negative_pool.size()) + (has_bias && !bias_in_positive ? 1 : 0);
  }
};

// Pairwise parameters reconstructed from the factorized storage.
struct PairParams {
  std::vector<double> weight;    // w_ij = 2(u_i - u_j)
  std::vector<double> midpoint;  // m_ij = (u_i + u_j)/2
  double bias = 0.0;             // b_ij (0 for KNN)
};

// i and j are indices into net.points (not pool slots).
PairParams pair_params(const NeuralizedNet& net, int i, int j);

struct ForwardTrace {
  std::vector<double> point_scores;     // s_l per source point
  std::vector<double> positive_values;  // pooled inputs per positive slot (bias slot last)
  std::vector<double> negative_values;  // h_j per negative slot (bias slot last)
  double positive_pooled = 0.0;         // smax / ranked-max over positive_values
  double g = 0.0;
  int positive_selected = -1;  // ranked only: slot at rank q
  int negative_selected = -1;
};

NeuralizedNet neuralize_svm(const SvmModel& model);
NeuralizedNet neuralize_knn(const KnnModel& model);

ForwardTrace forward(const NeuralizedNet& net, std::span<const double> x);

// Analytic input gradient of g; smooth pooling only.
std::vector<double> net_gradient(const NeuralizedNet& net, std::span<const double> x);

struct SignReport {
  long checked = 0;     // probes outside the dead zone
  long skipped = 0;     // probes with |f| <= dead_zone
  long mismatches = 0;  // sign(f) != sign(g) among checked
};

SignReport sign_equivalence_check(const Model& model, const NeuralizedNet& net,
                                  const Matrix& probes, double dead_zone = 1e-9);

}  // namespace distex

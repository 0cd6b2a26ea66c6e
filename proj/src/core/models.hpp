#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "core/matrix.hpp"

namespace distex {

// Gaussian-kernel SVM in dual form: f(x) = sum_l y_l a_l exp(-gamma |x-u_l|^2) + bias.
// Immutable after construction; squared row norms are cached for the
// expanded-form distance evaluation.
struct SvmModel {
  Matrix support_vectors;           // n x d
  std::vector<double> dual_coeffs;  // a_l > 0
  std::vector<int> labels;          // +1 / -1
  double gamma = 1.0;
  double bias = 0.0;
  std::vector<std::string> feature_names;  // optional
  std::vector<double> sq_norms;            // cached |u_l|^2
};

struct KnnModel {
  Matrix points;
  std::vector<int> labels;  // +1 / -1
  int k = 1;                // odd
  std::vector<std::string> feature_names;
  std::vector<double> sq_norms;

  int q() const { return (k + 1) / 2; }
};

// Kernel ridge regression / any signed-coefficient Gaussian expansion:
// f(x) = sum_l c_l exp(-gamma |x-x_l|^2).
struct KrrModel {
  Matrix points;
  std::vector<double> coeffs;  // signed
  double gamma = 1.0;
  double ridge = 0.0;
  std::vector<std::string> feature_names;
  std::vector<double> sq_norms;
};

SvmModel make_svm(Matrix support_vectors, std::vector<double> dual_coeffs,
                  std::vector<int> labels, double gamma, double bias,
                  std::vector<std::string> feature_names = {});
KnnModel make_knn(Matrix points, std::vector<int> labels, int k,
                  std::vector<std::string> feature_names = {});
KrrModel make_krr(Matrix points, std::vector<double> coeffs, double gamma,
                  double ridge = 0.0, std::vector<std::string> feature_names = {});

double svm_decision(const SvmModel& model, std::span<const double> x);
std::vector<double> svm_gradient(const SvmModel& model, std::span<const double> x);

// Signed vote count over the k nearest neighbors; distance ties at the k-th
// rank break toward the lower training index.
double knn_decision(const KnnModel& model, std::span<const double> x);

double krr_decision(const KrrModel& model, std::span<const double> x);
std::vector<double> krr_gradient(const KrrModel& model, std::span<const double> x);

// Rewrites the signed expansion as an SVM: (a_l, y_l) <- (|c_l|, sign c_l),
// zero coefficients dropped, bias 0. The decision function is unchanged.
SvmModel krr_to_svm(const KrrModel& model);

// Minimal two-variable SMO for the C-SVC dual. Returns the pruned model
// (support vectors with alpha > 1e-8 kept).
SvmModel train_svm(const Matrix& data, const std::vector<int>& labels, double gamma,
                   double C, double tolerance = 1e-3);

// Solves (K + ridge I) c = targets by Cholesky factorization.
KrrModel train_krr(const Matrix& data, const std::vector<double>& targets, double gamma,
                   double ridge);

using Model = std::variant<SvmModel, KnnModel, KrrModel>;

enum class ModelKind { svm, knn, krr };

ModelKind model_kind(const Model& model);
int model_dim(const Model& model);
double model_decision(const Model& model, std::span<const double> x);
// Throws InapplicableError for KNN models.
std::vector<double> model_gradient(const Model& model, std::span<const double> x);

struct TrainSpec {
  ModelKind kind = ModelKind::svm;
  double gamma = 1.0;
  double C = 1.0;
  int k = 1;
  double ridge = 1e-3;
};

Model train_model(const Matrix& data, const std::vector<double>& labels, const TrainSpec& spec);

// k-fold cross-validation score; sign accuracy for classifiers, negative
// mean squared error for regression. Higher is better.
double cross_val_score(const Matrix& data, const std::vector<double>& labels,
                       const TrainSpec& spec, int folds, uint64_t seed);

}  // namespace distex

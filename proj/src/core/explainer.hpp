#pragma once

#include <memory>
#include <optional>
#include <string>

#include "core/baselines.hpp"
#include "core/lrp.hpp"
#include "core/models.hpp"
#include "core/neuralize.hpp"

namespace distex {

enum class Method {
  lrp,          // relevance propagation through the neuralized model
  gi,           // gradient x input on the original model
  ig,           // integrated gradients on the original model
  sensitivity,  // squared gradient
  occlusion,
  shap,
  gi_neural,      // gradient x input on the neuralized (smooth) model
  random_scores,  // seeded noise, sanity baseline for evaluations
};

Method parse_method(const std::string& name);
std::string method_name(Method method);

struct ExplainerOptions {
  LrpHyperparams lrp;
  BaselineConfig baseline;
  bool use_heuristics = false;  // derive lrp params from the model scale
};

struct ExplanationResult {
  std::vector<double> relevance;
  double model_value = 0.0;              // f(x)
  std::optional<double> g_value;         // set for lrp / gi_neural
  std::optional<LrpHyperparams> params;  // set for lrp
};

// Immutable after construction; run() is const and safe to call from
// multiple threads. Gradient methods reject KNN models at construction.
class Explainer {
 public:
  Explainer(Model model, Method method, ExplainerOptions options);

  ExplanationResult run(std::span<const double> x, uint64_t salt) const;

  Method method() const { return method_; }
  const Model& model() const { return model_; }
  const NeuralizedNet* net() const { return net_ ? net_.get() : nullptr; }
  const ExplainerOptions& options() const { return options_; }

 private:
  Model model_;
  Method method_;
  ExplainerOptions options_;
  std::shared_ptr<const NeuralizedNet> net_;  // built for lrp / gi_neural
};

}  // namespace distex

#include "core/explainer.hpp"

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace distex {

Method parse_method(const std::string& name) {
  if (name == "lrp") return Method::lrp;
  if (name == "gi") return Method::gi;
  if (name == "ig") return Method::ig;
  if (name == "sensitivity") return Method::sensitivity;
  if (name == "occlusion") return Method::occlusion;
  if (name == "shap") return Method::shap;
  if (name == "gi-neural") return Method::gi_neural;
  if (name == "random") return Method::random_scores;
  throw InvalidArgumentError("unknown method '" + name + "'");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::lrp: return "lrp";
    case Method::gi: return "gi";
    case Method::ig: return "ig";
    case Method::sensitivity: return "sensitivity";
    case Method::occlusion: return "occlusion";
    case Method::shap: return "shap";
    case Method::gi_neural: return "gi-neural";
    case Method::random_scores: return "random";
  }
  return "?";
}

namespace {

NeuralizedNet build_net(const Model& model) {
  if (const auto* svm = std::get_if<SvmModel>(&model)) return neuralize_svm(*svm);
  if (const auto* knn = std::get_if<KnnModel>(&model)) return neuralize_knn(*knn);
  return neuralize_svm(krr_to_svm(std::get<KrrModel>(model)));
}

bool needs_gradient(Method method) {
  return method == Method::gi || method == Method::ig || method == Method::sensitivity;
}

}  // namespace

Explainer::Explainer(Model model, Method method, ExplainerOptions options)
    : model_(std::move(model)), method_(method), options_(std::move(options)) {
  if (needs_gradient(method_) && model_kind(model_) == ModelKind::knn)
    throw InapplicableError("gradient-based explanations are inapplicable to knn models");
  if (method_ == Method::lrp || method_ == Method::gi_neural) {
    auto net = std::make_shared<NeuralizedNet>(build_net(model_));
    if (method_ == Method::gi_neural && net->pool_kind != PoolKind::smooth)
      throw InapplicableError(
          "gradient-based explanations are inapplicable to knn models (ranked pooling)");
    if (method_ == Method::lrp) {
      if (options_.use_heuristics) options_.lrp = heuristic_params(model_);
      validate_params(*net, options_.lrp);
    }
    net_ = std::move(net);
  }
}

ExplanationResult Explainer::run(std::span<const double> x, uint64_t salt) const {
  ExplanationResult out;
  out.model_value = model_decision(model_, x);

  const ScalarFn f = [this](std::span<const double> p) { return model_decision(model_, p); };
  const GradientFn grad = [this](std::span<const double> p) {
    return model_gradient(model_, p);
  };

  switch (method_) {
    case Method::lrp: {
      Explanation e = explain(*net_, x, options_.lrp);
      out.relevance = std::move(e.relevance);
      out.g_value = e.g_value;
      out.params = e.params;
      break;
    }
    case Method::gi:
      out.relevance = gradient_x_input(grad, x);
      break;
    case Method::ig:
      out.relevance = integrated_gradients(grad, x, options_.baseline);
      break;
    case Method::sensitivity:
      out.relevance = sensitivity(grad, x);
      break;
    case Method::occlusion:
      out.relevance = occlusion(f, x, options_.baseline);
      break;
    case Method::shap: {
      BaselineConfig cfg = options_.baseline;
      cfg.rng_seed = mix_seed({options_.baseline.rng_seed, salt});
      out.relevance = shapley_sampling(f, x, cfg);
      break;
    }
    case Method::gi_neural: {
      const GradientFn g = [this](std::span<const double> p) { return net_gradient(*net_, p); };
      out.relevance = gradient_x_input(g, x);
      out.g_value = forward(*net_, x).g;
      break;
    }
    case Method::random_scores: {
      Rng rng(mix_seed({options_.baseline.rng_seed, salt, 0x726e64ULL}));
      out.relevance.resize(x.size());
      for (double& v : out.relevance) v = rng.uniform() * 2.0 - 1.0;
      break;
    }
  }
  return out;
}

}  // namespace distex

#include "distex.h"

#include <cmath>
#include <cstring>
#include <string>

#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/explainer.hpp"
#include "core/flipping.hpp"
#include "core/lrp.hpp"
#include "core/models.hpp"
#include "core/neuralize.hpp"
#include "core/serialize.hpp"

using namespace distex;

struct distex_dataset {
  Dataset value;
};
struct distex_model {
  Model value;
};
struct distex_net {
  NeuralizedNet value;
};
struct distex_explainer {
  Explainer value;
};
struct distex_inpainter {
  KdeInpainter value;
};

namespace {

thread_local std::string g_last_error = "";

distex_status fail(distex_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename Fn>
distex_status guarded(Fn&& fn) {
  try {
    fn();
    return DISTEX_OK;
  } catch (const InapplicableError& e) {
    return fail(DISTEX_ERROR_INAPPLICABLE, e.what());
  } catch (const DimensionError& e) {
    return fail(DISTEX_ERROR_DIMENSION, e.what());
  } catch (const ParseError& e) {
    return fail(DISTEX_ERROR_PARSE, e.what());
  } catch (const IoError& e) {
    return fail(DISTEX_ERROR_IO, e.what());
  } catch (const NumericalError& e) {
    return fail(DISTEX_ERROR_NUMERICAL, e.what());
  } catch (const InvalidArgumentError& e) {
    return fail(DISTEX_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(DISTEX_ERROR_UNKNOWN, e.what());
  } catch (...) {
    return fail(DISTEX_ERROR_UNKNOWN, "unknown error");
  }
}

distex_status require(bool condition, const char* message) {
  return condition ? DISTEX_OK : fail(DISTEX_ERROR_INVALID_ARGUMENT, message);
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const Matrix& model_points(const Model& m) {
  if (const auto* svm = std::get_if<SvmModel>(&m)) return svm->support_vectors;
  if (const auto* knn = std::get_if<KnnModel>(&m)) return knn->points;
  return std::get<KrrModel>(m).points;
}

}  // namespace

extern "C" {

const char* distex_version(void) { return "0.1.0"; }

const char* distex_last_error(void) { return g_last_error.c_str(); }

void distex_string_free(char* s) { delete[] s; }

/* ---- datasets ---------------------------------------------------------- */

distex_status distex_dataset_load_csv(const char* path, const char* label_column,
                                      distex_label_rule rule, double quantile,
                                      distex_dataset** out) {
  if (auto st = require(path && label_column && out, "null argument")) return st;
  return guarded([&] {
    CsvSchema schema;
    schema.label_column = label_column;
    schema.quantile = quantile;
    switch (rule) {
      case DISTEX_LABELS_AUTO: schema.rule = LabelRule::auto_detect; break;
      case DISTEX_LABELS_BINARY: schema.rule = LabelRule::binary; break;
      case DISTEX_LABELS_QUANTILE: schema.rule = LabelRule::quantile; break;
      case DISTEX_LABELS_NONE: schema.rule = LabelRule::none; break;
      default: throw InvalidArgumentError("unknown label rule");
    }
    *out = new distex_dataset{load_csv(path, schema)};
  });
}

distex_status distex_dataset_synthetic(const char* kind, uint64_t seed, int n, double noise,
                                       distex_dataset** out) {
  if (auto st = require(kind && out, "null argument")) return st;
  return guarded([&] {
    const std::string name = kind;
    Dataset ds;
    if (name == "two-moons")
      ds = synthetic_two_moons(seed, n, noise);
    else if (name == "xor")
      ds = synthetic_xor(seed, n, noise);
    else if (name == "gaussians")
      ds = synthetic_gaussians(seed, n, noise);
    else
      throw InvalidArgumentError("unknown synthetic dataset '" + name + "'");
    *out = new distex_dataset{std::move(ds)};
  });
}

distex_status distex_dataset_save_csv(const distex_dataset* dataset, const char* path) {
  if (auto st = require(dataset && path, "null argument")) return st;
  return guarded([&] { save_csv(dataset->value, path); });
}

void distex_dataset_free(distex_dataset* dataset) { delete dataset; }

distex_status distex_dataset_size(const distex_dataset* dataset, int* rows, int* cols) {
  if (auto st = require(dataset, "null dataset")) return st;
  if (rows) *rows = dataset->value.size();
  if (cols) *cols = dataset->value.dim();
  return DISTEX_OK;
}

distex_status distex_dataset_row(const distex_dataset* dataset, int row, double* out) {
  if (auto st = require(dataset && out, "null argument")) return st;
  if (auto st = require(row >= 0 && row < dataset->value.size(), "row out of range")) return st;
  const auto r = dataset->value.features.row(row);
  std::copy(r.begin(), r.end(), out);
  return DISTEX_OK;
}

distex_status distex_dataset_label(const distex_dataset* dataset, int row, double* out) {
  if (auto st = require(dataset && out, "null argument")) return st;
  if (auto st = require(row >= 0 && row < dataset->value.size(), "row out of range")) return st;
  *out = dataset->value.labels[row];
  return DISTEX_OK;
}

distex_status distex_dataset_feature_name(const distex_dataset* dataset, int column, char** out) {
  if (auto st = require(dataset && out, "null argument")) return st;
  if (auto st = require(column >= 0 && column < dataset->value.dim(), "column out of range"))
    return st;
  const auto& names = dataset->value.feature_names;
  *out = copy_string(column < static_cast<int>(names.size()) ? names[column]
                                                             : "f" + std::to_string(column));
  return DISTEX_OK;
}

distex_status distex_dataset_feature_means(const distex_dataset* dataset, double* out) {
  if (auto st = require(dataset && out, "null argument")) return st;
  return guarded([&] {
    const auto& f = dataset->value.features;
    for (int c = 0; c < f.cols(); ++c) {
      double s = 0.0;
      for (int r = 0; r < f.rows(); ++r) s += f(r, c);
      out[c] = f.rows() > 0 ? s / f.rows() : 0.0;
    }
  });
}

distex_status distex_dataset_preprocess(const distex_dataset* dataset, uint64_t seed,
                                        distex_dataset** train, distex_dataset** validation,
                                        distex_dataset** explain_set, char** normalization_json) {
  if (auto st = require(dataset && train && validation && explain_set, "null argument")) return st;
  return guarded([&] {
    PreprocessResult r = preprocess(dataset->value, seed);
    *train = new distex_dataset{std::move(r.train)};
    *validation = new distex_dataset{std::move(r.validation)};
    *explain_set = new distex_dataset{std::move(r.explain_set)};
    if (normalization_json)
      *normalization_json = copy_string(normalization_to_json(r.normalization));
  });
}

/* ---- models ------------------------------------------------------------ */

distex_status distex_train_svm(const distex_dataset* train, double gamma, double C,
                               distex_model** out) {
  if (auto st = require(train && out, "null argument")) return st;
  return guarded([&] {
    std::vector<int> labels(train->value.labels.size());
    for (size_t i = 0; i < labels.size(); ++i)
      labels[i] = train->value.labels[i] >= 0.0 ? 1 : -1;
    SvmModel m = train_svm(train->value.features, labels, gamma, C);
    m.feature_names = train->value.feature_names;
    *out = new distex_model{std::move(m)};
  });
}

distex_status distex_train_knn(const distex_dataset* train, int k, distex_model** out) {
  if (auto st = require(train && out, "null argument")) return st;
  return guarded([&] {
    std::vector<int> labels(train->value.labels.size());
    for (size_t i = 0; i < labels.size(); ++i)
      labels[i] = train->value.labels[i] >= 0.0 ? 1 : -1;
    *out = new distex_model{
        make_knn(train->value.features, std::move(labels), k, train->value.feature_names)};
  });
}

distex_status distex_train_krr(const distex_dataset* train, double gamma, double ridge,
                               distex_model** out) {
  if (auto st = require(train && out, "null argument")) return st;
  return guarded([&] {
    KrrModel m = train_krr(train->value.features, train->value.labels, gamma, ridge);
    m.feature_names = train->value.feature_names;
    *out = new distex_model{std::move(m)};
  });
}

distex_status distex_cross_val_score(const distex_dataset* data, distex_model_kind kind,
                                     double gamma, double C, int k, double ridge, int folds,
                                     uint64_t seed, double* score) {
  if (auto st = require(data && score, "null argument")) return st;
  return guarded([&] {
    TrainSpec spec;
    spec.kind = kind == DISTEX_MODEL_SVM   ? ModelKind::svm
                : kind == DISTEX_MODEL_KNN ? ModelKind::knn
                                           : ModelKind::krr;
    spec.gamma = gamma;
    spec.C = C;
    spec.k = k;
    spec.ridge = ridge;
    *score = cross_val_score(data->value.features, data->value.labels, spec, folds, seed);
  });
}

distex_status distex_model_save(const distex_model* model, const char* path) {
  if (auto st = require(model && path, "null argument")) return st;
  return guarded([&] { save_model(model->value, path); });
}

distex_status distex_model_load(const char* path, distex_model** out) {
  if (auto st = require(path && out, "null argument")) return st;
  return guarded([&] { *out = new distex_model{load_model(path)}; });
}

void distex_model_free(distex_model* model) { delete model; }

distex_status distex_model_kind_of(const distex_model* model, distex_model_kind* out) {
  if (auto st = require(model && out, "null argument")) return st;
  switch (model_kind(model->value)) {
    case ModelKind::svm: *out = DISTEX_MODEL_SVM; break;
    case ModelKind::knn: *out = DISTEX_MODEL_KNN; break;
    case ModelKind::krr: *out = DISTEX_MODEL_KRR; break;
  }
  return DISTEX_OK;
}

distex_status distex_model_dim(const distex_model* model, int* out) {
  if (auto st = require(model && out, "null argument")) return st;
  *out = model_dim(model->value);
  return DISTEX_OK;
}

distex_status distex_model_points(const distex_model* model, int* rows, double* out) {
  if (auto st = require(model && rows, "null argument")) return st;
  const Matrix& points = model_points(model->value);
  *rows = points.rows();
  if (out) std::copy(points.data().begin(), points.data().end(), out);
  return DISTEX_OK;
}

distex_status distex_model_feature_name(const distex_model* model, int column, char** out) {
  if (auto st = require(model && out, "null argument")) return st;
  const Matrix& points = model_points(model->value);
  if (auto st = require(column >= 0 && column < points.cols(), "column out of range")) return st;
  const auto& names = std::visit([](const auto& m) -> const std::vector<std::string>& {
    return m.feature_names;
  }, model->value);
  *out = copy_string(column < static_cast<int>(names.size()) ? names[column]
                                                             : "f" + std::to_string(column));
  return DISTEX_OK;
}

distex_status distex_model_decision(const distex_model* model, const double* x, int dim,
                                    double* out) {
  if (auto st = require(model && x && out, "null argument")) return st;
  return guarded([&] { *out = model_decision(model->value, {x, static_cast<size_t>(dim)}); });
}

distex_status distex_model_gradient(const distex_model* model, const double* x, int dim,
                                    double* out) {
  if (auto st = require(model && x && out, "null argument")) return st;
  return guarded([&] {
    const auto g = model_gradient(model->value, {x, static_cast<size_t>(dim)});
    std::copy(g.begin(), g.end(), out);
  });
}

distex_status distex_model_krr_to_svm(const distex_model* model, distex_model** out) {
  if (auto st = require(model && out, "null argument")) return st;
  return guarded([&] {
    const auto* krr = std::get_if<KrrModel>(&model->value);
    if (!krr) throw InvalidArgumentError("model is not a kernel ridge expansion");
    *out = new distex_model{krr_to_svm(*krr)};
  });
}

/* ---- neuralized networks ----------------------------------------------- */

distex_status distex_net_create(const distex_model* model, distex_net** out) {
  if (auto st = require(model && out, "null argument")) return st;
  return guarded([&] {
    if (const auto* svm = std::get_if<SvmModel>(&model->value))
      *out = new distex_net{neuralize_svm(*svm)};
    else if (const auto* knn = std::get_if<KnnModel>(&model->value))
      *out = new distex_net{neuralize_knn(*knn)};
    else
      *out = new distex_net{neuralize_svm(krr_to_svm(std::get<KrrModel>(model->value)))};
  });
}

void distex_net_free(distex_net* net) { delete net; }

distex_status distex_net_output(const distex_net* net, const double* x, int dim, double* g) {
  if (auto st = require(net && x && g, "null argument")) return st;
  return guarded([&] { *g = forward(net->value, {x, static_cast<size_t>(dim)}).g; });
}

distex_status distex_net_gradient(const distex_net* net, const double* x, int dim, double* out) {
  if (auto st = require(net && x && out, "null argument")) return st;
  return guarded([&] {
    const auto g = net_gradient(net->value, {x, static_cast<size_t>(dim)});
    std::copy(g.begin(), g.end(), out);
  });
}

distex_status distex_net_to_json(const distex_net* net, char** out) {
  if (auto st = require(net && out, "null argument")) return st;
  return guarded([&] { *out = copy_string(net_to_json(net->value)); });
}

distex_status distex_net_sign_check(const distex_model* model, const distex_net* net,
                                    const double* probes, int n, int dim, long* checked,
                                    long* mismatches) {
  if (auto st = require(model && net && probes && checked && mismatches, "null argument"))
    return st;
  return guarded([&] {
    Matrix m(n, dim);
    std::copy(probes, probes + static_cast<size_t>(n) * dim, m.data().begin());
    const SignReport report = sign_equivalence_check(model->value, net->value, m);
    *checked = report.checked;
    *mismatches = report.mismatches;
  });
}

/* ---- explanations ------------------------------------------------------ */

void distex_explain_options_init(distex_explain_options* options) {
  if (!options) return;
  options->eta = 0.5;
  options->beta = 1.0;
  options->kappa = 0;
  options->use_heuristics = 0;
  options->ig_steps = 10;
  options->shap_permutations = 10;
  options->occlusion_fill = nullptr;
  options->seed = 0;
}

distex_status distex_explainer_create(const distex_model* model, distex_method method,
                                      const distex_explain_options* options,
                                      distex_explainer** out) {
  if (auto st = require(model && out, "null argument")) return st;
  return guarded([&] {
    distex_explain_options defaults;
    distex_explain_options_init(&defaults);
    const distex_explain_options& opt = options ? *options : defaults;

    ExplainerOptions eo;
    eo.lrp.eta = opt.eta;
    eo.lrp.beta = opt.beta;
    eo.lrp.kappa = opt.kappa;
    eo.use_heuristics = opt.use_heuristics != 0;
    eo.baseline.ig_steps = opt.ig_steps;
    eo.baseline.shap_permutations = opt.shap_permutations;
    eo.baseline.rng_seed = opt.seed;
    if (opt.occlusion_fill) {
      const int dim = model_points(model->value).cols();
      eo.baseline.occlusion_fill.assign(opt.occlusion_fill, opt.occlusion_fill + dim);
    }

    Method m;
    switch (method) {
      case DISTEX_METHOD_LRP: m = Method::lrp; break;
      case DISTEX_METHOD_GI: m = Method::gi; break;
      case DISTEX_METHOD_IG: m = Method::ig; break;
      case DISTEX_METHOD_SENSITIVITY: m = Method::sensitivity; break;
      case DISTEX_METHOD_OCCLUSION: m = Method::occlusion; break;
      case DISTEX_METHOD_SHAP: m = Method::shap; break;
      case DISTEX_METHOD_GI_NEURAL: m = Method::gi_neural; break;
      case DISTEX_METHOD_RANDOM: m = Method::random_scores; break;
      default: throw InvalidArgumentError("unknown method");
    }
    *out = new distex_explainer{Explainer(model->value, m, std::move(eo))};
  });
}

void distex_explainer_free(distex_explainer* explainer) { delete explainer; }

distex_status distex_explainer_run(const distex_explainer* explainer, const double* x, int dim,
                                   uint64_t salt, double* relevance, double* model_value,
                                   double* g_value) {
  if (auto st = require(explainer && x && relevance, "null argument")) return st;
  return guarded([&] {
    const ExplanationResult r = explainer->value.run({x, static_cast<size_t>(dim)}, salt);
    std::copy(r.relevance.begin(), r.relevance.end(), relevance);
    if (model_value) *model_value = r.model_value;
    if (g_value) *g_value = r.g_value.value_or(std::nan(""));
  });
}

distex_status distex_explainer_params(const distex_explainer* explainer, double* eta, double* beta,
                                      int* kappa) {
  if (auto st = require(explainer, "null explainer")) return st;
  const LrpHyperparams& p = explainer->value.options().lrp;
  if (eta) *eta = p.eta;
  if (beta) *beta = p.beta;
  if (kappa) *kappa = p.kappa;
  return DISTEX_OK;
}

distex_status distex_heuristic_params(const distex_model* model, double* eta, double* beta,
                                      int* kappa) {
  if (auto st = require(model, "null model")) return st;
  return guarded([&] {
    const LrpHyperparams p = heuristic_params(model->value);
    if (eta) *eta = p.eta;
    if (beta) *beta = p.beta;
    if (kappa) *kappa = p.kappa;
  });
}

/* ---- evaluation -------------------------------------------------------- */

distex_status distex_inpainter_create(const distex_dataset* reference, uint64_t seed,
                                      distex_inpainter** out) {
  if (auto st = require(reference && out, "null argument")) return st;
  return guarded(
      [&] { *out = new distex_inpainter{make_kde_inpainter(reference->value.features, seed)}; });
}

void distex_inpainter_free(distex_inpainter* inpainter) { delete inpainter; }

distex_status distex_inpaint(const distex_inpainter* inpainter, const double* x, int dim,
                             const int* removed, int n_removed, uint64_t call_seed, double* out) {
  if (auto st = require(inpainter && x && removed && out, "null argument")) return st;
  return guarded([&] {
    const InpaintResult r = inpaint(inpainter->value, {x, static_cast<size_t>(dim)},
                                    {removed, static_cast<size_t>(n_removed)}, call_seed);
    std::copy(r.values.begin(), r.values.end(), out);
  });
}

distex_status distex_flip_curve(const distex_model* model, const distex_inpainter* inpainter,
                                const double* relevance, const double* x, int dim, int repeats,
                                uint64_t seed, uint64_t salt, double* outcomes, double* aufc) {
  if (auto st = require(model && inpainter && relevance && x && outcomes, "null argument"))
    return st;
  return guarded([&] {
    const ScalarFn decider = [&](std::span<const double> p) {
      return model_decision(model->value, p);
    };
    const FlippingCurve curve =
        flip(decider, {relevance, static_cast<size_t>(dim)}, {x, static_cast<size_t>(dim)},
             inpainter->value, repeats, seed, salt);
    std::copy(curve.outcomes.begin(), curve.outcomes.end(), outcomes);
    if (aufc) *aufc = curve.aufc;
  });
}

distex_status distex_evaluate(const distex_model* model, const distex_explainer* explainer,
                              const distex_inpainter* inpainter, const distex_dataset* samples,
                              int repeats, uint64_t seed, int threads, double* mean_aufc,
                              double* std_aufc, double* curves) {
  if (auto st = require(model && explainer && inpainter && samples && mean_aufc, "null argument"))
    return st;
  return guarded([&] {
    const ScalarFn decider = [&](std::span<const double> p) {
      return model_decision(model->value, p);
    };
    const BatchExplainFn explain_fn = [&](std::span<const double> x, uint64_t salt) {
      return explainer->value.run(x, salt).relevance;
    };
    const MethodEvaluation eval = evaluate_method(decider, explain_fn, samples->value.features,
                                                  inpainter->value, repeats, seed, threads);
    *mean_aufc = eval.mean_aufc;
    if (std_aufc) *std_aufc = eval.std_aufc;
    if (curves)
      std::copy(eval.curves.data().begin(), eval.curves.data().end(), curves);
  });
}

} /* extern "C" */

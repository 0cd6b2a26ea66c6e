// distex command line: train, explain, evaluate, ablate, surface, neuralize.
// Talks to the core exclusively through the C API in distex.h.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <thread>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "distex.h"
#include "svg.hpp"
#include "util.hpp"

using cli::CliError;
using cli::format_double;
using nlohmann::json;

namespace {

int map_status(distex_status status) {
  switch (status) {
    case DISTEX_OK: return 0;
    case DISTEX_ERROR_INVALID_ARGUMENT:
    case DISTEX_ERROR_PARSE:
    case DISTEX_ERROR_IO: return 2;
    case DISTEX_ERROR_DIMENSION:
    case DISTEX_ERROR_INAPPLICABLE: return 3;
    default: return 4;
  }
}

void check(distex_status status) {
  if (status != DISTEX_OK) throw CliError(map_status(status), distex_last_error());
}

struct DatasetDeleter {
  void operator()(distex_dataset* p) const { distex_dataset_free(p); }
};
struct ModelDeleter {
  void operator()(distex_model* p) const { distex_model_free(p); }
};
struct NetDeleter {
  void operator()(distex_net* p) const { distex_net_free(p); }
};
struct ExplainerDeleter {
  void operator()(distex_explainer* p) const { distex_explainer_free(p); }
};
struct InpainterDeleter {
  void operator()(distex_inpainter* p) const { distex_inpainter_free(p); }
};

using DatasetPtr = std::unique_ptr<distex_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<distex_model, ModelDeleter>;
using NetPtr = std::unique_ptr<distex_net, NetDeleter>;
using ExplainerPtr = std::unique_ptr<distex_explainer, ExplainerDeleter>;
using InpainterPtr = std::unique_ptr<distex_inpainter, InpainterDeleter>;

std::string owned_string(char* s) {
  std::string out = s ? s : "";
  distex_string_free(s);
  return out;
}

// Loads a split CSV written by `train` (label column last, values kept).
DatasetPtr load_split(const std::string& path) {
  const auto header = cli::csv_header(path);
  distex_dataset* raw = nullptr;
  check(distex_dataset_load_csv(path.c_str(), header.back().c_str(), DISTEX_LABELS_NONE, 0.5,
                                &raw));
  return DatasetPtr(raw);
}

ModelPtr load_model(const std::string& path) {
  distex_model* raw = nullptr;
  check(distex_model_load(path.c_str(), &raw));
  return ModelPtr(raw);
}

std::vector<std::string> dataset_feature_names(const distex_dataset* ds) {
  int rows = 0, cols = 0;
  check(distex_dataset_size(ds, &rows, &cols));
  std::vector<std::string> names(cols);
  for (int c = 0; c < cols; ++c) {
    char* s = nullptr;
    check(distex_dataset_feature_name(ds, c, &s));
    names[c] = owned_string(s);
  }
  return names;
}

distex_method parse_method_flag(const std::string& name) {
  static const std::map<std::string, distex_method> table = {
      {"lrp", DISTEX_METHOD_LRP},           {"gi", DISTEX_METHOD_GI},
      {"ig", DISTEX_METHOD_IG},             {"sensitivity", DISTEX_METHOD_SENSITIVITY},
      {"occlusion", DISTEX_METHOD_OCCLUSION}, {"shap", DISTEX_METHOD_SHAP},
      {"gi-neural", DISTEX_METHOD_GI_NEURAL}, {"random", DISTEX_METHOD_RANDOM}};
  const auto it = table.find(name);
  if (it == table.end()) throw CliError(2, "unknown method '" + name + "'");
  return it->second;
}

struct CommonOptions {
  uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = ".";
};

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw CliError(2, "cannot create output directory '" + dir + "'");
}

struct MethodOverrides {
  std::vector<double> etas;  // repeatable
  std::optional<double> beta;
  std::optional<int> kappa;
  int ig_steps = 10;
  int shap_permutations = 10;
  bool heuristic = false;
};

void add_method_flags(CLI::App* cmd, MethodOverrides& overrides) {
  cmd->add_option("--eta", overrides.etas, "reference interpolation in [0,1]; repeatable")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--beta", overrides.beta, "smooth pooling stiffness (> 0)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--kappa", overrides.kappa, "rank band half-width (>= 0)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--steps", overrides.ig_steps, "integrated-gradients steps")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--permutations", overrides.shap_permutations, "shapley removal orders")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--heuristic", overrides.heuristic,
                "derive eta/beta/kappa from the model scale");
}

distex_explain_options build_options(const MethodOverrides& overrides, double eta,
                                     const std::vector<double>* fill, uint64_t seed) {
  distex_explain_options options;
  distex_explain_options_init(&options);
  options.eta = eta;
  if (overrides.beta) options.beta = *overrides.beta;
  if (overrides.kappa) options.kappa = *overrides.kappa;
  options.use_heuristics = overrides.heuristic ? 1 : 0;
  options.ig_steps = overrides.ig_steps;
  options.shap_permutations = overrides.shap_permutations;
  options.occlusion_fill = fill && !fill->empty() ? fill->data() : nullptr;
  options.seed = seed;
  return options;
}

std::vector<double> dataset_means(const distex_dataset* ds) {
  int rows = 0, cols = 0;
  check(distex_dataset_size(ds, &rows, &cols));
  std::vector<double> means(cols);
  check(distex_dataset_feature_means(ds, means.data()));
  return means;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string data_path;
  std::string label_column;
  std::string binarize = "auto";
  std::string kind = "svm";
  std::vector<double> gamma_grid{1.0};
  std::vector<double> c_grid{1.0};
  std::vector<int> k_grid{1, 3, 5};
  std::vector<double> ridge_grid{1e-3};
  int folds = 5;
  CommonOptions common;
};

std::pair<distex_label_rule, double> parse_binarize(const std::string& text) {
  if (text == "auto") return {DISTEX_LABELS_AUTO, 0.5};
  if (text == "binary") return {DISTEX_LABELS_BINARY, 0.5};
  if (text == "none") return {DISTEX_LABELS_NONE, 0.5};
  if (text == "median") return {DISTEX_LABELS_QUANTILE, 0.5};
  if (text.rfind("q:", 0) == 0) {
    const double q = std::atof(text.c_str() + 2);
    if (!(q > 0.0 && q < 1.0)) throw CliError(2, "quantile must lie in (0,1): " + text);
    return {DISTEX_LABELS_QUANTILE, q};
  }
  throw CliError(2, "unknown binarize rule '" + text + "'");
}

int run_train(const TrainArgs& args) {
  ensure_out_dir(args.common.out_dir);
  const auto [rule, quantile] = parse_binarize(args.binarize);

  distex_dataset* raw = nullptr;
  check(distex_dataset_load_csv(args.data_path.c_str(), args.label_column.c_str(), rule,
                                quantile, &raw));
  DatasetPtr full(raw);

  distex_dataset* train_raw = nullptr;
  distex_dataset* val_raw = nullptr;
  distex_dataset* explain_raw = nullptr;
  char* norm_json = nullptr;
  check(distex_dataset_preprocess(full.get(), args.common.seed, &train_raw, &val_raw,
                                  &explain_raw, &norm_json));
  DatasetPtr train(train_raw), validation(val_raw), explain_set(explain_raw);
  cli::write_text_file(args.common.out_dir + "/normalization.json",
                       owned_string(norm_json) + "\n");
  check(distex_dataset_save_csv(train.get(), (args.common.out_dir + "/train.csv").c_str()));
  check(distex_dataset_save_csv(validation.get(),
                                (args.common.out_dir + "/validation.csv").c_str()));
  check(distex_dataset_save_csv(explain_set.get(),
                                (args.common.out_dir + "/explain.csv").c_str()));

  struct GridPoint {
    double gamma = 0, C = 0, ridge = 0;
    int k = 0;
    double score = 0;
  };
  std::vector<GridPoint> grid;
  distex_model_kind kind;
  if (args.kind == "svm") {
    kind = DISTEX_MODEL_SVM;
    for (double g : args.gamma_grid)
      for (double c : args.c_grid) grid.push_back({g, c, 0, 0, 0});
  } else if (args.kind == "knn") {
    kind = DISTEX_MODEL_KNN;
    for (int k : args.k_grid) grid.push_back({0, 0, 0, k, 0});
  } else if (args.kind == "krr") {
    kind = DISTEX_MODEL_KRR;
    for (double g : args.gamma_grid)
      for (double r : args.ridge_grid) grid.push_back({g, 0, r, 0, 0});
  } else {
    throw CliError(2, "unknown model kind '" + args.kind + "'");
  }
  if (grid.empty()) throw CliError(2, "empty hyperparameter grid");

  std::string report = "kind,gamma,C,k,ridge,cv_score\n";
  size_t best = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    auto& point = grid[i];
    if (grid.size() == 1) {
      point.score = std::nan("");  // single candidate: no search
    } else {
      check(distex_cross_val_score(train.get(), kind, point.gamma, point.C, point.k,
                                   point.ridge, args.folds, args.common.seed, &point.score));
      if (point.score > grid[best].score) best = i;
    }
    report += args.kind + "," + format_double(point.gamma) + "," + format_double(point.C) +
              "," + std::to_string(point.k) + "," + format_double(point.ridge) + "," +
              format_double(point.score) + "\n";
  }
  cli::write_text_file(args.common.out_dir + "/cv_report.csv", report);

  const GridPoint& chosen = grid[best];
  distex_model* model_raw = nullptr;
  if (kind == DISTEX_MODEL_SVM)
    check(distex_train_svm(train.get(), chosen.gamma, chosen.C, &model_raw));
  else if (kind == DISTEX_MODEL_KNN)
    check(distex_train_knn(train.get(), chosen.k, &model_raw));
  else
    check(distex_train_krr(train.get(), chosen.gamma, chosen.ridge, &model_raw));
  ModelPtr model(model_raw);
  const std::string model_path = args.common.out_dir + "/model.json";
  check(distex_model_save(model.get(), model_path.c_str()));

  std::cout << "trained " << args.kind << " model -> " << model_path << "\n";
  if (grid.size() > 1)
    std::cout << "best cv score " << format_double(chosen.score) << " (gamma="
              << format_double(chosen.gamma) << " C=" << format_double(chosen.C)
              << " k=" << chosen.k << " ridge=" << format_double(chosen.ridge) << ")\n";
  return 0;
}

// ---- explain ---------------------------------------------------------------

struct ExplainArgs {
  std::string model_path;
  std::string data_path;
  std::string fill_data_path;
  std::string method = "lrp";
  int samples = -1;  // all
  MethodOverrides overrides;
  CommonOptions common;
};

int run_explain(const ExplainArgs& args) {
  ensure_out_dir(args.common.out_dir);
  ModelPtr model = load_model(args.model_path);
  DatasetPtr data = load_split(args.data_path);
  const std::string model_hash = cli::hex64(cli::fnv1a(cli::read_text_file(args.model_path)));

  int rows = 0, dim = 0;
  check(distex_dataset_size(data.get(), &rows, &dim));
  int model_dim = 0;
  check(distex_model_dim(model.get(), &model_dim));
  if (model_dim != dim)
    throw CliError(3, "model expects " + std::to_string(model_dim) + " features, data has " +
                          std::to_string(dim));
  const int count = args.samples < 0 ? rows : std::min(args.samples, rows);
  const auto names = dataset_feature_names(data.get());

  std::vector<double> fill;
  if (!args.fill_data_path.empty()) fill = dataset_means(load_split(args.fill_data_path).get());

  const distex_method method = parse_method_flag(args.method);
  std::vector<double> etas = args.overrides.etas;
  if (etas.empty()) etas.push_back(0.5);
  const bool multi_eta = etas.size() > 1;

  for (double eta : etas) {
    const distex_explain_options options =
        build_options(args.overrides, eta, &fill, args.common.seed);
    distex_explainer* explainer_raw = nullptr;
    check(distex_explainer_create(model.get(), method, &options, &explainer_raw));
    ExplainerPtr explainer(explainer_raw);

    double used_eta = 0, used_beta = 0;
    int used_kappa = 0;
    check(distex_explainer_params(explainer.get(), &used_eta, &used_beta, &used_kappa));

    // per-sample results are independent; outputs are keyed by index so the
    // worker count cannot affect any byte written
    std::vector<std::vector<double>> inputs(count), relevances(count);
    std::vector<double> f_values(count), g_values(count);
    std::vector<distex_status> statuses(count, DISTEX_OK);
    {
      const int workers = std::max(1, std::min(args.common.threads, count));
      std::vector<std::thread> pool;
      std::atomic<int> next{0};
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            inputs[i].resize(dim);
            relevances[i].resize(dim);
            distex_status st =
                distex_dataset_row(data.get(), i, inputs[i].data());
            if (st == DISTEX_OK)
              st = distex_explainer_run(explainer.get(), inputs[i].data(), dim,
                                        static_cast<uint64_t>(i), relevances[i].data(),
                                        &f_values[i], &g_values[i]);
            statuses[i] = st;
          }
        });
      }
      for (auto& t : pool) t.join();
    }
    for (distex_status st : statuses) check(st);

    for (int i = 0; i < count; ++i) {
      const std::vector<double>& x = inputs[i];
      const std::vector<double>& relevance = relevances[i];
      const double f_value = f_values[i];
      const double g_value = g_values[i];
      std::string stem = args.common.out_dir + "/" + args.method + "_sample" +
                         std::to_string(i);
      if (multi_eta) stem += "_eta" + format_double(eta);

      std::string csv = "feature,relevance,input_value\n";
      for (int k = 0; k < dim; ++k)
        csv += names[k] + "," + format_double(relevance[k]) + "," + format_double(x[k]) + "\n";
      cli::write_text_file(stem + ".csv", csv);

      json sidecar;
      sidecar["method"] = args.method;
      sidecar["sample_index"] = i;
      sidecar["f_value"] = f_value;
      if (std::isfinite(g_value)) sidecar["g_value"] = g_value;
      if (method == DISTEX_METHOD_LRP) {
        sidecar["eta"] = used_eta;
        sidecar["beta"] = used_beta;
        sidecar["kappa"] = used_kappa;
      }
      if (method == DISTEX_METHOD_IG) sidecar["steps"] = args.overrides.ig_steps;
      if (method == DISTEX_METHOD_SHAP)
        sidecar["permutations"] = args.overrides.shap_permutations;
      sidecar["seed"] = args.common.seed;
      sidecar["model_hash"] = model_hash;
      cli::write_text_file(stem + ".json", sidecar.dump(2) + "\n");
    }
  }
  std::cout << "wrote " << count * etas.size() << " explanation(s) to " << args.common.out_dir
            << "\n";
  return 0;
}

// ---- evaluate / ablate -----------------------------------------------------

struct EvaluateArgs {
  std::string model_path;
  std::string data_path;
  std::string train_data_path;
  std::vector<std::string> methods{"lrp"};
  int samples = -1;
  int repeats = 5;
  MethodOverrides overrides;
  CommonOptions common;
};

struct MethodResult {
  std::string name;
  double mean = 0, stddev = 0;
  int n = 0;
  std::vector<double> mean_curve;
};

MethodResult evaluate_one(const std::string& method_name, distex_method method,
                          const distex_model* model, const distex_dataset* samples,
                          const distex_inpainter* inpainter, const EvaluateArgs& args,
                          const std::vector<double>& fill, const std::string& curve_path) {
  int rows = 0, dim = 0;
  check(distex_dataset_size(samples, &rows, &dim));

  const distex_explain_options options =
      build_options(args.overrides, args.overrides.etas.empty() ? 0.5 : args.overrides.etas[0],
                    &fill, args.common.seed);
  distex_explainer* explainer_raw = nullptr;
  check(distex_explainer_create(model, method, &options, &explainer_raw));
  ExplainerPtr explainer(explainer_raw);

  MethodResult result;
  result.name = method_name;
  result.n = rows;
  std::vector<double> curves(static_cast<size_t>(rows) * dim);
  check(distex_evaluate(model, explainer.get(), inpainter, samples, args.repeats,
                        args.common.seed, args.common.threads, &result.mean, &result.stddev,
                        curves.data()));

  std::string csv = "sample_id,step,outcome\n";
  for (int i = 0; i < rows; ++i)
    for (int t = 0; t < dim; ++t)
      csv += std::to_string(i) + "," + std::to_string(t + 1) + "," +
             format_double(curves[static_cast<size_t>(i) * dim + t]) + "\n";
  cli::write_text_file(curve_path, csv);

  result.mean_curve.assign(dim, 0.0);
  for (int i = 0; i < rows; ++i)
    for (int t = 0; t < dim; ++t)
      result.mean_curve[t] += curves[static_cast<size_t>(i) * dim + t] / rows;
  return result;
}

DatasetPtr truncate_dataset(const distex_dataset* ds, int count, const std::string& tmp_name) {
  int rows = 0, dim = 0;
  check(distex_dataset_size(ds, &rows, &dim));
  if (count < 0 || count >= rows) return DatasetPtr(nullptr);
  // round-trip through a truncated csv keeps the C surface small
  const auto names = dataset_feature_names(ds);
  std::string csv;
  for (const auto& n : names) csv += n + ",";
  csv += "label\n";
  std::vector<double> x(dim);
  for (int i = 0; i < count; ++i) {
    check(distex_dataset_row(ds, i, x.data()));
    double label = 0;
    check(distex_dataset_label(ds, i, &label));
    for (double v : x) csv += format_double(v) + ",";
    csv += format_double(label) + "\n";
  }
  cli::write_text_file(tmp_name, csv);
  return load_split(tmp_name);
}

int run_evaluate(const EvaluateArgs& args, bool ablation) {
  ensure_out_dir(args.common.out_dir);
  ModelPtr model = load_model(args.model_path);
  DatasetPtr data = load_split(args.data_path);
  DatasetPtr train = load_split(args.train_data_path);

  if (ablation) {
    distex_model_kind kind;
    check(distex_model_kind_of(model.get(), &kind));
    if (kind == DISTEX_MODEL_KNN)
      throw CliError(3, "ablation requires a differentiable (svm or krr) model");
  }

  distex_inpainter* inpainter_raw = nullptr;
  check(distex_inpainter_create(train.get(), args.common.seed, &inpainter_raw));
  InpainterPtr inpainter(inpainter_raw);

  const std::vector<double> fill = dataset_means(train.get());

  DatasetPtr truncated =
      truncate_dataset(data.get(), args.samples, args.common.out_dir + "/.samples.csv");
  const distex_dataset* samples = truncated ? truncated.get() : data.get();

  std::vector<std::pair<std::string, distex_method>> plan;
  if (ablation) {
    plan = {{"gi", DISTEX_METHOD_GI},
            {"gi-neural", DISTEX_METHOD_GI_NEURAL},
            {"lrp", DISTEX_METHOD_LRP}};
  } else {
    for (const auto& name : args.methods) plan.emplace_back(name, parse_method_flag(name));
  }
  if (plan.empty()) throw CliError(2, "no methods requested");

  EvaluateArgs local = args;
  if (ablation) local.overrides.heuristic = true;  // table defaults for the lrp arm

  std::vector<MethodResult> results;
  const std::string prefix = ablation ? "ablation_curves_" : "curves_";
  for (const auto& [name, method] : plan) {
    results.push_back(evaluate_one(name, method, model.get(), samples, inpainter.get(), local,
                                   fill, args.common.out_dir + "/" + prefix + name + ".csv"));
  }

  std::string summary = ablation ? "arm,mean_aufc,std,n\n" : "method,mean_aufc,std,n\n";
  for (const auto& r : results)
    summary += r.name + "," + format_double(r.mean) + "," + format_double(r.stddev) + "," +
               std::to_string(r.n) + "\n";
  const std::string summary_name = ablation ? "ablation.csv" : "summary.csv";
  cli::write_text_file(args.common.out_dir + "/" + summary_name, summary);

  std::vector<cli::svg::Series> series;
  for (const auto& r : results) series.push_back({r.name, r.mean_curve});
  cli::write_text_file(args.common.out_dir + "/flipping_curves.svg",
                       cli::svg::line_chart("Mean flipping curves", "features removed",
                                            "mean outcome", series));
  if (ablation) {
    std::vector<cli::svg::Bar> bars;
    for (const auto& r : results)
      bars.push_back({r.name, r.mean, r.stddev / std::sqrt(std::max(1, r.n))});
    cli::write_text_file(args.common.out_dir + "/ablation.svg",
                         cli::svg::bar_chart("Explanation accuracy by stage", "mean AUFC",
                                             bars));
  }

  for (const auto& r : results)
    std::cout << r.name << ": mean_aufc=" << format_double(r.mean)
              << " std=" << format_double(r.stddev) << " n=" << r.n << "\n";
  return 0;
}

// ---- surface ---------------------------------------------------------------

struct SurfaceArgs {
  std::string model_path;
  int resolution = 120;
  double pad = 0.5;
  CommonOptions common;
};

int run_surface(const SurfaceArgs& args) {
  ensure_out_dir(args.common.out_dir);
  ModelPtr model = load_model(args.model_path);
  int dim = 0;
  check(distex_model_dim(model.get(), &dim));
  if (dim != 2) throw CliError(3, "surface rendering needs a 2-d model");
  if (args.resolution < 2) throw CliError(2, "resolution must be at least 2");

  int rows = 0;
  check(distex_model_points(model.get(), &rows, nullptr));
  std::vector<double> points(static_cast<size_t>(rows) * 2);
  check(distex_model_points(model.get(), &rows, points.data()));
  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (int i = 0; i < rows; ++i) {
    x_min = std::min(x_min, points[2 * i]);
    x_max = std::max(x_max, points[2 * i]);
    y_min = std::min(y_min, points[2 * i + 1]);
    y_max = std::max(y_max, points[2 * i + 1]);
  }
  x_min -= args.pad;
  x_max += args.pad;
  y_min -= args.pad;
  y_max += args.pad;

  NetPtr net;
  {
    distex_net* raw = nullptr;
    check(distex_net_create(model.get(), &raw));
    net.reset(raw);
  }

  const int res = args.resolution;
  std::vector<double> f_grid(static_cast<size_t>(res) * res);
  std::vector<double> g_grid(static_cast<size_t>(res) * res);
  std::string csv = "x0,x1,f,g\n";
  for (int r = 0; r < res; ++r) {
    const double y = y_min + (y_max - y_min) * r / (res - 1);
    for (int c = 0; c < res; ++c) {
      const double x = x_min + (x_max - x_min) * c / (res - 1);
      const double probe[2] = {x, y};
      double f = 0, g = 0;
      check(distex_model_decision(model.get(), probe, 2, &f));
      check(distex_net_output(net.get(), probe, 2, &g));
      f_grid[static_cast<size_t>(r) * res + c] = f;
      g_grid[static_cast<size_t>(r) * res + c] = g;
      csv += format_double(x) + "," + format_double(y) + "," + format_double(f) + "," +
             format_double(g) + "\n";
    }
  }
  cli::write_text_file(args.common.out_dir + "/surface_grid.csv", csv);
  cli::write_text_file(
      args.common.out_dir + "/surface.svg",
      cli::svg::heatmap_pair("f(x)  original model", "g(x)  neuralized", res, f_grid, g_grid,
                             x_min, x_max, y_min, y_max));
  std::cout << "wrote " << res << "x" << res << " decision surfaces to " << args.common.out_dir
            << "\n";
  return 0;
}

// ---- neuralize -------------------------------------------------------------

struct NeuralizeArgs {
  std::string model_path;
  std::string out_path = "net.json";
  int probes = 1000;
  uint64_t seed = 1;
};

int run_neuralize(const NeuralizeArgs& args) {
  ModelPtr model = load_model(args.model_path);
  NetPtr net;
  {
    distex_net* raw = nullptr;
    check(distex_net_create(model.get(), &raw));
    net.reset(raw);
  }
  char* text = nullptr;
  check(distex_net_to_json(net.get(), &text));
  cli::write_text_file(args.out_path, owned_string(text) + "\n");

  if (args.probes > 0) {
    int dim = 0, rows = 0;
    check(distex_model_dim(model.get(), &dim));
    check(distex_model_points(model.get(), &rows, nullptr));
    std::vector<double> points(static_cast<size_t>(rows) * dim);
    check(distex_model_points(model.get(), &rows, points.data()));
    std::vector<double> lo(dim, 1e300), hi(dim, -1e300);
    for (int i = 0; i < rows; ++i) {
      for (int c = 0; c < dim; ++c) {
        lo[c] = std::min(lo[c], points[static_cast<size_t>(i) * dim + c]);
        hi[c] = std::max(hi[c], points[static_cast<size_t>(i) * dim + c]);
      }
    }
    // xorshift probe cloud around the data range
    uint64_t state = args.seed * 2654435761ULL + 1;
    std::vector<double> probes(static_cast<size_t>(args.probes) * dim);
    for (auto& v : probes) {
      state ^= state << 13;
      state ^= state >> 7;
      state ^= state << 17;
      v = (state >> 11) * 0x1.0p-53;
    }
    for (int i = 0; i < args.probes; ++i)
      for (int c = 0; c < dim; ++c) {
        auto& v = probes[static_cast<size_t>(i) * dim + c];
        v = lo[c] - 0.5 + v * (hi[c] - lo[c] + 1.0);
      }
    long checked = 0, mismatches = 0;
    check(distex_net_sign_check(model.get(), net.get(), probes.data(), args.probes, dim,
                                &checked, &mismatches));
    std::cout << "sign check: " << checked << " probes checked, " << mismatches
              << " mismatches\n";
  }
  std::cout << "wrote " << args.out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"explanations for distance-based classifiers (svm / knn / krr)"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "preprocess a csv and fit a model by grid search");
  train_cmd->add_option("--data", train_args.data_path, "input csv")->required();
  train_cmd->add_option("--label", train_args.label_column, "label column name")->required();
  train_cmd->add_option("--binarize", train_args.binarize,
                        "auto | binary | none | median | q:<p>");
  train_cmd->add_option("--model-kind", train_args.kind, "svm | knn | krr");
  train_cmd->add_option("--gamma-grid", train_args.gamma_grid, "kernel width candidates")
      ->delimiter(',');
  train_cmd->add_option("--C-grid", train_args.c_grid, "svm box candidates")->delimiter(',');
  train_cmd->add_option("--k-grid", train_args.k_grid, "knn neighbor candidates")
      ->delimiter(',');
  train_cmd->add_option("--ridge-grid", train_args.ridge_grid, "krr ridge candidates")
      ->delimiter(',');
  train_cmd->add_option("--folds", train_args.folds, "cross-validation folds")
      ->check(CLI::Range(2, 20));
  train_cmd->add_option("--seed", train_args.common.seed, "split seed");
  train_cmd->add_option("--out", train_args.common.out_dir, "output directory")->required();

  ExplainArgs explain_args;
  auto* explain_cmd = app.add_subcommand("explain", "write per-sample feature attributions");
  explain_cmd->add_option("--model", explain_args.model_path, "model json")->required();
  explain_cmd->add_option("--data", explain_args.data_path, "samples csv (label column last)")
      ->required();
  explain_cmd->add_option("--method", explain_args.method,
                          "lrp | gi | ig | sensitivity | occlusion | shap | gi-neural | random");
  explain_cmd->add_option("--samples", explain_args.samples, "how many rows to explain");
  explain_cmd->add_option("--fill-data", explain_args.fill_data_path,
                          "csv supplying occlusion fill means (train split)");
  add_method_flags(explain_cmd, explain_args.overrides);
  explain_cmd->add_option("--seed", explain_args.common.seed, "sampling seed");
  explain_cmd->add_option("--threads", explain_args.common.threads, "worker cap")
      ->check(CLI::PositiveNumber);
  explain_cmd->add_option("--out", explain_args.common.out_dir, "output directory")->required();

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "pixel-flipping accuracy for explainers");
  eval_cmd->add_option("--model", eval_args.model_path, "model json")->required();
  eval_cmd->add_option("--data", eval_args.data_path, "explanation split csv")->required();
  eval_cmd->add_option("--train-data", eval_args.train_data_path,
                       "training split csv (inpainter reference)")
      ->required();
  eval_cmd->add_option("--method", eval_args.methods, "methods to compare; repeatable")
      ->delimiter(',');
  eval_cmd->add_option("--samples", eval_args.samples, "cap on evaluated rows");
  eval_cmd->add_option("--repeats", eval_args.repeats, "inpainting draws per step")
      ->check(CLI::PositiveNumber);
  add_method_flags(eval_cmd, eval_args.overrides);
  eval_cmd->add_option("--seed", eval_args.common.seed, "evaluation seed");
  eval_cmd->add_option("--threads", eval_args.common.threads, "worker cap")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--out", eval_args.common.out_dir, "output directory")->required();

  EvaluateArgs ablate_args;
  auto* ablate_cmd =
      app.add_subcommand("ablate", "three-arm study: gi on f, gi on g, full lrp");
  ablate_cmd->add_option("--model", ablate_args.model_path, "svm model json")->required();
  ablate_cmd->add_option("--data", ablate_args.data_path, "explanation split csv")->required();
  ablate_cmd->add_option("--train-data", ablate_args.train_data_path, "training split csv")
      ->required();
  ablate_cmd->add_option("--samples", ablate_args.samples, "cap on evaluated rows");
  ablate_cmd->add_option("--repeats", ablate_args.repeats, "inpainting draws per step")
      ->check(CLI::PositiveNumber);
  ablate_cmd->add_option("--seed", ablate_args.common.seed, "evaluation seed");
  ablate_cmd->add_option("--threads", ablate_args.common.threads, "worker cap")
      ->check(CLI::PositiveNumber);
  ablate_cmd->add_option("--out", ablate_args.common.out_dir, "output directory")->required();

  SurfaceArgs surface_args;
  auto* surface_cmd =
      app.add_subcommand("surface", "render f and g heatmaps for a 2-d model");
  surface_cmd->add_option("--model", surface_args.model_path, "model json")->required();
  surface_cmd->add_option("--resolution", surface_args.resolution, "grid cells per axis");
  surface_cmd->add_option("--pad", surface_args.pad, "margin around the data range");
  surface_cmd->add_option("--out", surface_args.common.out_dir, "output directory")->required();

  NeuralizeArgs neuralize_args;
  auto* neuralize_cmd =
      app.add_subcommand("neuralize", "dump the network rewrite of a model as json");
  neuralize_cmd->add_option("--model", neuralize_args.model_path, "model json")->required();
  neuralize_cmd->add_option("--out", neuralize_args.out_path, "output json path");
  neuralize_cmd->add_option("--probes", neuralize_args.probes,
                            "sign-check probe count (0 disables)");
  neuralize_cmd->add_option("--seed", neuralize_args.seed, "probe seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (train_cmd->parsed()) return run_train(train_args);
    if (explain_cmd->parsed()) return run_explain(explain_args);
    if (eval_cmd->parsed()) return run_evaluate(eval_args, false);
    if (ablate_cmd->parsed()) return run_evaluate(ablate_args, true);
    if (surface_cmd->parsed()) return run_surface(surface_args);
    if (neuralize_cmd->parsed()) return run_neuralize(neuralize_args);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "distex.h"

namespace {

struct DatasetHandle {
  distex_dataset* ptr = nullptr;
  ~DatasetHandle() { distex_dataset_free(ptr); }
};

}  // namespace

TEST_CASE("c api version and error plumbing") {
  CHECK(std::string(distex_version()) == "0.1.0");
  CHECK(distex_last_error() != nullptr);
  double out = 0.0;
  CHECK(distex_model_decision(nullptr, nullptr, 0, &out) == DISTEX_ERROR_INVALID_ARGUMENT);
  CHECK(std::strlen(distex_last_error()) > 0);
}

TEST_CASE("c api dataset lifecycle and preprocessing") {
  DatasetHandle ds;
  REQUIRE(distex_dataset_synthetic("gaussians", 7, 500, 0.4, &ds.ptr) == DISTEX_OK);
  int rows = 0, cols = 0;
  REQUIRE(distex_dataset_size(ds.ptr, &rows, &cols) == DISTEX_OK);
  CHECK(rows == 500);
  CHECK(cols == 2);

  char* name = nullptr;
  REQUIRE(distex_dataset_feature_name(ds.ptr, 0, &name) == DISTEX_OK);
  CHECK(std::string(name) == "x0");
  distex_string_free(name);

  DatasetHandle train, val, expl;
  char* norm_json = nullptr;
  REQUIRE(distex_dataset_preprocess(ds.ptr, 3, &train.ptr, &val.ptr, &expl.ptr, &norm_json) ==
          DISTEX_OK);
  REQUIRE(norm_json != nullptr);
  CHECK(std::string(norm_json).find("\"scale\"") != std::string::npos);
  distex_string_free(norm_json);
  REQUIRE(distex_dataset_size(train.ptr, &rows, &cols) == DISTEX_OK);
  CHECK(rows == 400);
  REQUIRE(distex_dataset_size(expl.ptr, &rows, &cols) == DISTEX_OK);
  CHECK(rows == 100);

  CHECK(distex_dataset_synthetic("nope", 1, 10, 0.0, &ds.ptr) ==
        DISTEX_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("c api training, decisions, serialization and neuralization") {
  DatasetHandle ds;
  REQUIRE(distex_dataset_synthetic("gaussians", 11, 200, 0.3, &ds.ptr) == DISTEX_OK);

  double score = 0.0;
  REQUIRE(distex_cross_val_score(ds.ptr, DISTEX_MODEL_SVM, 1.0, 10.0, 0, 0.0, 5, 1, &score) ==
          DISTEX_OK);
  CHECK(score == doctest::Approx(1.0));

  distex_model* svm = nullptr;
  REQUIRE(distex_train_svm(ds.ptr, 1.0, 10.0, &svm) == DISTEX_OK);
  distex_model_kind kind;
  REQUIRE(distex_model_kind_of(svm, &kind) == DISTEX_OK);
  CHECK(kind == DISTEX_MODEL_SVM);
  int dim = 0;
  REQUIRE(distex_model_dim(svm, &dim) == DISTEX_OK);
  CHECK(dim == 2);

  const double x_pos[2] = {2.0, 1.0};
  double f = 0.0;
  REQUIRE(distex_model_decision(svm, x_pos, 2, &f) == DISTEX_OK);
  CHECK(f > 0.0);

  double grad[2] = {0, 0};
  REQUIRE(distex_model_gradient(svm, x_pos, 2, grad) == DISTEX_OK);

  const char* path = "/tmp/distex_capi_model.json";
  REQUIRE(distex_model_save(svm, path) == DISTEX_OK);
  distex_model* back = nullptr;
  REQUIRE(distex_model_load(path, &back) == DISTEX_OK);
  double f2 = 0.0;
  REQUIRE(distex_model_decision(back, x_pos, 2, &f2) == DISTEX_OK);
  CHECK(f2 == f);
  std::remove(path);

  distex_net* net = nullptr;
  REQUIRE(distex_net_create(svm, &net) == DISTEX_OK);
  double g = 0.0;
  REQUIRE(distex_net_output(net, x_pos, 2, &g) == DISTEX_OK);
  CHECK(g > 0.0);

  // random probe cloud: no sign disagreements
  std::vector<double> probes;
  uint64_t state = 12345;
  for (int i = 0; i < 2000; ++i) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    probes.push_back(((state >> 16) % 10000) / 1250.0 - 4.0);
  }
  long checked = 0, mismatches = 0;
  REQUIRE(distex_net_sign_check(svm, net, probes.data(), 1000, 2, &checked, &mismatches) ==
          DISTEX_OK);
  CHECK(checked > 0);
  CHECK(mismatches == 0);

  char* net_json = nullptr;
  REQUIRE(distex_net_to_json(net, &net_json) == DISTEX_OK);
  CHECK(std::string(net_json).find("neural-svm") != std::string::npos);
  distex_string_free(net_json);

  distex_net_free(net);
  distex_model_free(back);
  distex_model_free(svm);
}

TEST_CASE("c api explainers and the knn gradient rejection") {
  DatasetHandle ds;
  REQUIRE(distex_dataset_synthetic("gaussians", 5, 120, 0.3, &ds.ptr) == DISTEX_OK);
  distex_model* knn = nullptr;
  REQUIRE(distex_train_knn(ds.ptr, 3, &knn) == DISTEX_OK);

  distex_explainer* bad = nullptr;
  CHECK(distex_explainer_create(knn, DISTEX_METHOD_GI, nullptr, &bad) ==
        DISTEX_ERROR_INAPPLICABLE);
  CHECK(std::string(distex_last_error()).find("inapplicable") != std::string::npos);

  distex_explain_options options;
  distex_explain_options_init(&options);
  options.use_heuristics = 1;
  distex_explainer* lrp = nullptr;
  REQUIRE(distex_explainer_create(knn, DISTEX_METHOD_LRP, &options, &lrp) == DISTEX_OK);
  double eta = 0, beta = 0;
  int kappa = -1;
  REQUIRE(distex_explainer_params(lrp, &eta, &beta, &kappa) == DISTEX_OK);
  CHECK(eta == doctest::Approx(0.8));
  CHECK(kappa == 1);

  const double x[2] = {1.5, 0.5};
  double relevance[2] = {0, 0};
  double f = 0, g = 0;
  REQUIRE(distex_explainer_run(lrp, x, 2, 0, relevance, &f, &g) == DISTEX_OK);
  CHECK(std::abs(f) >= 1.0);  // odd knn vote
  CHECK(std::isfinite(g));
  distex_explainer_free(lrp);

  double h_eta = 0, h_beta = 0;
  int h_kappa = 0;
  REQUIRE(distex_heuristic_params(knn, &h_eta, &h_beta, &h_kappa) == DISTEX_OK);
  CHECK(h_eta == doctest::Approx(0.8));
  CHECK(h_kappa == 1);
  distex_model_free(knn);
}

TEST_CASE("c api inpainting and evaluation") {
  DatasetHandle ds;
  REQUIRE(distex_dataset_synthetic("gaussians", 17, 240, 0.4, &ds.ptr) == DISTEX_OK);
  distex_model* svm = nullptr;
  REQUIRE(distex_train_svm(ds.ptr, 1.0, 10.0, &svm) == DISTEX_OK);

  distex_inpainter* inp = nullptr;
  REQUIRE(distex_inpainter_create(ds.ptr, 9, &inp) == DISTEX_OK);
  const double x[2] = {0.25, -0.75};
  const int removed[1] = {1};
  double filled[2] = {0, 0};
  REQUIRE(distex_inpaint(inp, x, 2, removed, 1, 77, filled) == DISTEX_OK);
  CHECK(filled[0] == x[0]);
  CHECK(filled[1] != x[1]);

  distex_explain_options options;
  distex_explain_options_init(&options);
  options.use_heuristics = 1;
  distex_explainer* lrp = nullptr;
  REQUIRE(distex_explainer_create(svm, DISTEX_METHOD_LRP, &options, &lrp) == DISTEX_OK);

  double relevance[2];
  double fx;
  REQUIRE(distex_explainer_run(lrp, x, 2, 0, relevance, &fx, nullptr) == DISTEX_OK);
  double outcomes[2];
  double aufc = 0.0;
  REQUIRE(distex_flip_curve(svm, inp, relevance, x, 2, 3, 5, 0, outcomes, &aufc) == DISTEX_OK);
  CHECK(aufc >= -1.0);
  CHECK(aufc <= 1.0);

  double mean1 = 0, std1 = 0, mean4 = 0, std4 = 0;
  std::vector<double> curves1(240 * 2), curves4(240 * 2);
  REQUIRE(distex_evaluate(svm, lrp, inp, ds.ptr, 2, 13, 1, &mean1, &std1, curves1.data()) ==
          DISTEX_OK);
  REQUIRE(distex_evaluate(svm, lrp, inp, ds.ptr, 2, 13, 4, &mean4, &std4, curves4.data()) ==
          DISTEX_OK);
  CHECK(mean1 == mean4);
  CHECK(std1 == std4);
  CHECK(curves1 == curves4);

  distex_explainer_free(lrp);
  distex_inpainter_free(inp);
  distex_model_free(svm);
}

/*
 * distex - explanations for distance-based models.
 *
 * C API over the C++ core: Gaussian-kernel SVM / KNN / kernel ridge models,
 * their neural-network rewrites (linear detection units + pooling), fast
 * relevance propagation, five baseline attribution methods, and a
 * pixel-flipping evaluation harness with KDE inpainting.
 *
 * All handles are opaque; every function returns a distex_status and the
 * last error message is available per thread via distex_last_error().
 * Handles are immutable after creation and safe to share across threads.
 */

#ifndef DISTEX_H
#define DISTEX_H

#include <stdint.h>

#ifdef _WIN32
#define DISTEX_API __declspec(dllexport)
#else
#define DISTEX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum distex_status {
  DISTEX_OK = 0,
  DISTEX_ERROR_INVALID_ARGUMENT = 1,
  DISTEX_ERROR_DIMENSION = 2,
  DISTEX_ERROR_PARSE = 3,
  DISTEX_ERROR_IO = 4,
  DISTEX_ERROR_NUMERICAL = 5,
  DISTEX_ERROR_INAPPLICABLE = 6, /* method undefined for the model, e.g. gradients on KNN */
  DISTEX_ERROR_UNKNOWN = 7
} distex_status;

typedef enum distex_model_kind {
  DISTEX_MODEL_SVM = 0,
  DISTEX_MODEL_KNN = 1,
  DISTEX_MODEL_KRR = 2
} distex_model_kind;

typedef enum distex_method {
  DISTEX_METHOD_LRP = 0,
  DISTEX_METHOD_GI = 1,
  DISTEX_METHOD_IG = 2,
  DISTEX_METHOD_SENSITIVITY = 3,
  DISTEX_METHOD_OCCLUSION = 4,
  DISTEX_METHOD_SHAP = 5,
  DISTEX_METHOD_GI_NEURAL = 6,
  DISTEX_METHOD_RANDOM = 7
} distex_method;

typedef enum distex_label_rule {
  DISTEX_LABELS_AUTO = 0,     /* two values -> map to -1/+1, else median threshold */
  DISTEX_LABELS_BINARY = 1,   /* column must hold exactly two values */
  DISTEX_LABELS_QUANTILE = 2, /* +1 iff value >= column quantile */
  DISTEX_LABELS_NONE = 3      /* keep raw values (regression targets) */
} distex_label_rule;

typedef struct distex_dataset distex_dataset;
typedef struct distex_model distex_model;
typedef struct distex_net distex_net;
typedef struct distex_explainer distex_explainer;
typedef struct distex_inpainter distex_inpainter;

DISTEX_API const char* distex_version(void);

/* Message for the last failure on the calling thread; never NULL. */
DISTEX_API const char* distex_last_error(void);

DISTEX_API void distex_string_free(char* s);

/* ---- datasets ---------------------------------------------------------- */

DISTEX_API distex_status distex_dataset_load_csv(const char* path, const char* label_column,
                                                 distex_label_rule rule, double quantile,
                                                 distex_dataset** out);

/* kind: "two-moons", "xor" or "gaussians". */
DISTEX_API distex_status distex_dataset_synthetic(const char* kind, uint64_t seed, int n,
                                                  double noise, distex_dataset** out);

DISTEX_API distex_status distex_dataset_save_csv(const distex_dataset* dataset, const char* path);
DISTEX_API void distex_dataset_free(distex_dataset* dataset);

DISTEX_API distex_status distex_dataset_size(const distex_dataset* dataset, int* rows, int* cols);
DISTEX_API distex_status distex_dataset_row(const distex_dataset* dataset, int row, double* out);
DISTEX_API distex_status distex_dataset_label(const distex_dataset* dataset, int row, double* out);
DISTEX_API distex_status distex_dataset_feature_name(const distex_dataset* dataset, int column,
                                                     char** out);
DISTEX_API distex_status distex_dataset_feature_means(const distex_dataset* dataset, double* out);

/* Shuffle, split 20% validation (explanation subset capped at 300 rows),
 * standardize on training statistics and rescale so the median pairwise
 * training distance is 1. normalization_json receives the fitted transform
 * (caller frees with distex_string_free); pass NULL to skip it. */
DISTEX_API distex_status distex_dataset_preprocess(const distex_dataset* dataset, uint64_t seed,
                                                   distex_dataset** train,
                                                   distex_dataset** validation,
                                                   distex_dataset** explain_set,
                                                   char** normalization_json);

/* ---- models ------------------------------------------------------------ */

DISTEX_API distex_status distex_train_svm(const distex_dataset* train, double gamma, double C,
                                          distex_model** out);
DISTEX_API distex_status distex_train_knn(const distex_dataset* train, int k, distex_model** out);
DISTEX_API distex_status distex_train_krr(const distex_dataset* train, double gamma, double ridge,
                                          distex_model** out);

/* 5-fold style cross-validation; score is sign accuracy for SVM/KNN and
 * negative mean squared error for KRR. */
DISTEX_API distex_status distex_cross_val_score(const distex_dataset* data,
                                                distex_model_kind kind, double gamma, double C,
                                                int k, double ridge, int folds, uint64_t seed,
                                                double* score);

DISTEX_API distex_status distex_model_save(const distex_model* model, const char* path);
DISTEX_API distex_status distex_model_load(const char* path, distex_model** out);
DISTEX_API void distex_model_free(distex_model* model);

DISTEX_API distex_status distex_model_kind_of(const distex_model* model, distex_model_kind* out);
DISTEX_API distex_status distex_model_dim(const distex_model* model, int* out);

/* Stored points (support vectors / training data), row-major. Pass a NULL
 * buffer to query the row count only. */
DISTEX_API distex_status distex_model_points(const distex_model* model, int* rows, double* out);
DISTEX_API distex_status distex_model_feature_name(const distex_model* model, int column,
                                                   char** out);

DISTEX_API distex_status distex_model_decision(const distex_model* model, const double* x,
                                               int dim, double* out);
/* Fails with DISTEX_ERROR_INAPPLICABLE for KNN models. */
DISTEX_API distex_status distex_model_gradient(const distex_model* model, const double* x,
                                               int dim, double* out);

/* Rewrites a kernel ridge expansion as an SVM with identical outputs. */
DISTEX_API distex_status distex_model_krr_to_svm(const distex_model* model, distex_model** out);

/* ---- neuralized networks ----------------------------------------------- */

DISTEX_API distex_status distex_net_create(const distex_model* model, distex_net** out);
DISTEX_API void distex_net_free(distex_net* net);

DISTEX_API distex_status distex_net_output(const distex_net* net, const double* x, int dim,
                                           double* g);
DISTEX_API distex_status distex_net_gradient(const distex_net* net, const double* x, int dim,
                                             double* out);
DISTEX_API distex_status distex_net_to_json(const distex_net* net, char** out);

/* Counts probes where sign(f) != sign(g), ignoring |f| <= 1e-9. Probes are
 * row-major n x dim. */
DISTEX_API distex_status distex_net_sign_check(const distex_model* model, const distex_net* net,
                                               const double* probes, int n, int dim,
                                               long* checked, long* mismatches);

/* ---- explanations ------------------------------------------------------ */

typedef struct distex_explain_options {
  double eta;            /* reference interpolation in [0,1] */
  double beta;           /* smooth pooling stiffness, > 0 */
  int kappa;             /* ranked band half-width, >= 0 */
  int use_heuristics;    /* nonzero: derive eta/beta/kappa from the model */
  int ig_steps;          /* integrated gradients quadrature points */
  int shap_permutations; /* feature removal orders */
  const double* occlusion_fill; /* length dim, NULL for zeros */
  uint64_t seed;
} distex_explain_options;

DISTEX_API void distex_explain_options_init(distex_explain_options* options);

DISTEX_API distex_status distex_explainer_create(const distex_model* model, distex_method method,
                                                 const distex_explain_options* options,
                                                 distex_explainer** out);
DISTEX_API void distex_explainer_free(distex_explainer* explainer);

/* relevance must hold dim doubles. salt separates batch items so that
 * sampled methods stay deterministic under any execution order. model_value
 * receives f(x) and g_value the neuralized output (NaN when not defined);
 * either pointer may be NULL. */
DISTEX_API distex_status distex_explainer_run(const distex_explainer* explainer, const double* x,
                                              int dim, uint64_t salt, double* relevance,
                                              double* model_value, double* g_value);

/* Resolved hyperparameters of an LRP explainer (after heuristics). */
DISTEX_API distex_status distex_explainer_params(const distex_explainer* explainer, double* eta,
                                                 double* beta, int* kappa);

/* Table-driven defaults for a model: eta/beta for SVM and KRR, eta/kappa
 * for KNN. */
DISTEX_API distex_status distex_heuristic_params(const distex_model* model, double* eta,
                                                 double* beta, int* kappa);

/* ---- evaluation -------------------------------------------------------- */

DISTEX_API distex_status distex_inpainter_create(const distex_dataset* reference, uint64_t seed,
                                                 distex_inpainter** out);
DISTEX_API void distex_inpainter_free(distex_inpainter* inpainter);

DISTEX_API distex_status distex_inpaint(const distex_inpainter* inpainter, const double* x,
                                        int dim, const int* removed, int n_removed,
                                        uint64_t call_seed, double* out);

/* Flipping curve for one sample; outcomes must hold dim doubles. */
DISTEX_API distex_status distex_flip_curve(const distex_model* model,
                                           const distex_inpainter* inpainter,
                                           const double* relevance, const double* x, int dim,
                                           int repeats, uint64_t seed, uint64_t salt,
                                           double* outcomes, double* aufc);

/* Explains and flips every row of `samples`. curves may be NULL or hold
 * rows*dim doubles (row-major, one flipping curve per sample). */
DISTEX_API distex_status distex_evaluate(const distex_model* model,
                                         const distex_explainer* explainer,
                                         const distex_inpainter* inpainter,
                                         const distex_dataset* samples, int repeats,
                                         uint64_t seed, int threads, double* mean_aufc,
                                         double* std_aufc, double* curves);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DISTEX_H */

/* fed3r — federated closed-form ridge classification simulator.
 *
 * C interface to the simulation core. All objects are opaque handles created
 * and destroyed through this API; every fallible call returns a fed3r_status
 * (FED3R_OK on success) and leaves a thread-local message retrievable via
 * fed3r_last_error().
 */

#ifndef FED3R_H
#define FED3R_H

#include <stddef.h>
#include <stdint.h>

#ifndef FED3R_API
#define FED3R_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef int fed3r_status;

enum {
  FED3R_OK = 0,
  FED3R_ERR_INVALID_ARGUMENT = 1,
  FED3R_ERR_DIMENSION_MISMATCH = 2,
  FED3R_ERR_LABEL_OUT_OF_RANGE = 3,
  FED3R_ERR_NOT_POSITIVE_DEFINITE = 4,
  FED3R_ERR_EMPTY_DATASET = 5,
  FED3R_ERR_IO = 6,
  FED3R_ERR_BAD_MAGIC = 7,
  FED3R_ERR_VERSION_UNSUPPORTED = 8,
  FED3R_ERR_TRUNCATED_FILE = 9,
  FED3R_ERR_INVALID_MANIFEST = 10,
  FED3R_ERR_TOO_MANY_CLIENTS = 11,
  FED3R_ERR_EMPTY_CLASS = 12,
  FED3R_ERR_POOL_EXHAUSTED = 13,
  FED3R_ERR_UNKNOWN_ALGORITHM = 14,
  FED3R_ERR_INVALID_BANDWIDTH = 15,
  FED3R_ERR_EMPTY_GRID = 16,
  FED3R_ERR_INTERNAL = 17
};

enum {
  FED3R_SAMPLING_WITHOUT_REPLACEMENT = 0,
  FED3R_SAMPLING_WITH_REPLACEMENT = 1
};

enum {
  FED3R_ALG_FED3R = 0,
  FED3R_ALG_FED3R_RF = 1,
  FED3R_ALG_FEDAVG_LP = 2,
  FED3R_ALG_FEDAVGM_LP = 3,
  FED3R_ALG_FEDAVG_FULL = 4,
  FED3R_ALG_FEDAVGM_FULL = 5
};

enum {
  FED3R_LP_INIT_RANDOM = 0,
  FED3R_LP_INIT_FED3R = 1
};

FED3R_API const char* fed3r_version(void);

/** Static name of a status code, e.g. "dimension_mismatch". */
FED3R_API const char* fed3r_strerror(fed3r_status code);

/** Message of the last failing call on this thread; empty string if none. */
FED3R_API const char* fed3r_last_error(void);

typedef struct fed3r_dataset fed3r_dataset;
typedef struct fed3r_manifest fed3r_manifest;
typedef struct fed3r_stats fed3r_stats;
typedef struct fed3r_classifier fed3r_classifier;
typedef struct fed3r_rff fed3r_rff;
typedef struct fed3r_trace fed3r_trace;
typedef struct fed3r_coverage fed3r_coverage;

/* ---------------------------------------------------------------------- */
/* Datasets                                                               */
/* ---------------------------------------------------------------------- */

/** Wraps copies of row-major features (n x dim) and labels in [0, classes). */
FED3R_API fed3r_status fed3r_dataset_create(const double* features,
                                            const uint32_t* labels, uint64_t n,
                                            uint64_t dim, uint64_t classes,
                                            fed3r_dataset** out);

/** Balanced Gaussian mixture: class means on random directions of length
 *  `separation`, diagonal covariance with condition number `anisotropy`. */
FED3R_API fed3r_status fed3r_dataset_generate(uint64_t classes, uint64_t dim,
                                              uint64_t per_class,
                                              double separation,
                                              double anisotropy, uint64_t seed,
                                              fed3r_dataset** out);

FED3R_API fed3r_status fed3r_dataset_read(const char* path, fed3r_dataset** out);
FED3R_API fed3r_status fed3r_dataset_write(const fed3r_dataset* ds,
                                           const char* path);

FED3R_API uint64_t fed3r_dataset_count(const fed3r_dataset* ds);
FED3R_API uint64_t fed3r_dataset_dim(const fed3r_dataset* ds);
FED3R_API uint64_t fed3r_dataset_classes(const fed3r_dataset* ds);
/** Borrowed pointers, valid until the dataset is destroyed. */
FED3R_API const double* fed3r_dataset_features(const fed3r_dataset* ds);
FED3R_API const uint32_t* fed3r_dataset_labels(const fed3r_dataset* ds);

FED3R_API void fed3r_dataset_destroy(fed3r_dataset* ds);

/* ---------------------------------------------------------------------- */
/* Partition manifests                                                    */
/* ---------------------------------------------------------------------- */

/** Dirichlet label-skew split into `clients` shards; every client keeps at
 *  least one sample. alpha must be positive. */
FED3R_API fed3r_status fed3r_manifest_dirichlet(const fed3r_dataset* ds,
                                                uint64_t clients, double alpha,
                                                uint64_t seed,
                                                fed3r_manifest** out);

/** One client per class (times clients_per_class), single label per client. */
FED3R_API fed3r_status fed3r_manifest_single_class(const fed3r_dataset* ds,
                                                   uint64_t seed,
                                                   uint64_t clients_per_class,
                                                   fed3r_manifest** out);

FED3R_API fed3r_status fed3r_manifest_read(const char* path,
                                           fed3r_manifest** out);
FED3R_API fed3r_status fed3r_manifest_write(const fed3r_manifest* m,
                                            const char* path);

FED3R_API uint64_t fed3r_manifest_clients(const fed3r_manifest* m);
FED3R_API uint64_t fed3r_manifest_client_size(const fed3r_manifest* m,
                                              uint64_t client);
/** Copies the client's sorted sample indices into `out` (capacity entries). */
FED3R_API fed3r_status fed3r_manifest_client_indices(const fed3r_manifest* m,
                                                     uint64_t client,
                                                     uint64_t* out,
                                                     uint64_t capacity);

FED3R_API void fed3r_manifest_destroy(fed3r_manifest* m);

/* ---------------------------------------------------------------------- */
/* Ridge statistics and classifiers                                       */
/* ---------------------------------------------------------------------- */

FED3R_API fed3r_status fed3r_stats_compute(const fed3r_dataset* ds,
                                           fed3r_stats** out);
FED3R_API fed3r_status fed3r_stats_merge(const fed3r_stats* a,
                                         const fed3r_stats* b,
                                         fed3r_stats** out);
FED3R_API fed3r_status fed3r_stats_read(const char* path, fed3r_stats** out);
FED3R_API fed3r_status fed3r_stats_write(const fed3r_stats* s, const char* path);
FED3R_API uint64_t fed3r_stats_dim(const fed3r_stats* s);
FED3R_API uint64_t fed3r_stats_classes(const fed3r_stats* s);
FED3R_API uint64_t fed3r_stats_count(const fed3r_stats* s);
FED3R_API void fed3r_stats_destroy(fed3r_stats* s);

/** Closed-form ridge solve on accumulated statistics (Cholesky; never an
 *  explicit inverse). ridge_lambda must be positive. */
FED3R_API fed3r_status fed3r_classifier_solve(const fed3r_stats* s,
                                              double ridge_lambda,
                                              fed3r_classifier** out);

/** Unit-normalizes the classifier columns in place. Columns of (near) zero
 *  norm are left untouched; their count is written to zero_columns when
 *  non-NULL. */
FED3R_API fed3r_status fed3r_classifier_normalize(fed3r_classifier* cls,
                                                  uint64_t* zero_columns);

/** Whole-dataset reference solution: stats, solve, normalize in one step. */
FED3R_API fed3r_status fed3r_classifier_centralized(const fed3r_dataset* ds,
                                                    double ridge_lambda,
                                                    fed3r_classifier** out);

FED3R_API fed3r_status fed3r_classifier_predict(const fed3r_classifier* cls,
                                                const double* features,
                                                uint64_t dim, uint64_t* out);
FED3R_API fed3r_status fed3r_classifier_accuracy(const fed3r_classifier* cls,
                                                 const fed3r_dataset* ds,
                                                 double* out);
FED3R_API fed3r_status fed3r_classifier_read(const char* path,
                                             fed3r_classifier** out);
FED3R_API fed3r_status fed3r_classifier_write(const fed3r_classifier* cls,
                                              const char* path);
FED3R_API uint64_t fed3r_classifier_dim(const fed3r_classifier* cls);
FED3R_API uint64_t fed3r_classifier_classes(const fed3r_classifier* cls);
FED3R_API double fed3r_classifier_temperature(const fed3r_classifier* cls);
FED3R_API fed3r_status fed3r_classifier_set_temperature(fed3r_classifier* cls,
                                                        double temperature);
/** Borrowed row-major dim x classes weight matrix. */
FED3R_API const double* fed3r_classifier_weights(const fed3r_classifier* cls);
FED3R_API void fed3r_classifier_destroy(fed3r_classifier* cls);

/* ---------------------------------------------------------------------- */
/* Random features                                                        */
/* ---------------------------------------------------------------------- */

/** Frozen random-feature map approximating the RBF kernel with bandwidth
 *  `sigma`. Fully reconstructible from (dim, output_dim, sigma, seed). */
FED3R_API fed3r_status fed3r_rff_sample(uint64_t dim, uint64_t output_dim,
                                        double sigma, uint64_t seed,
                                        fed3r_rff** out);

/** Maps a dataset's features to the output dimension; labels carry over. */
FED3R_API fed3r_status fed3r_rff_apply(const fed3r_rff* map,
                                       const fed3r_dataset* ds,
                                       fed3r_dataset** out);

FED3R_API fed3r_status fed3r_kernel_exact(const double* a, const double* b,
                                          uint64_t dim, double sigma,
                                          double* out);
FED3R_API void fed3r_rff_destroy(fed3r_rff* map);

/* ---------------------------------------------------------------------- */
/* Federated runs                                                         */
/* ---------------------------------------------------------------------- */

typedef struct {
  uint64_t clients;            /* K; 0 takes the manifest's count */
  uint64_t clients_per_round;  /* per-round participation */
  int sampling;                /* FED3R_SAMPLING_* */
  uint64_t rounds_max;         /* with-replacement cap; 0 = until coverage */
  double ridge_lambda;
  uint64_t rff_dim;            /* 0 = linear statistics */
  double rff_sigma;
  int rff_has_seed;            /* 0: derive the map seed from `seed` */
  uint64_t rff_seed;
  uint64_t seed;
  uint64_t eval_every;         /* 0 = evaluate at termination only */
  uint64_t threads;            /* 0 = hardware concurrency */
  int charge_rff_transfer;     /* cost the d*D map download per client */
} fed3r_run_config;

typedef struct {
  double lr;
  double weight_decay;
  uint64_t batch_size;
  uint64_t local_epochs;
  double server_lr;
  double server_momentum;
  uint64_t rounds;
  double temperature;
  int init; /* FED3R_LP_INIT_* */
} fed3r_lp_config;

typedef struct {
  uint64_t feature_dim;
  uint64_t classes;
  uint64_t rff_dim;
  uint64_t local_epochs;
  uint64_t clients_per_round;
  uint64_t clients;
  double extractor_fwd_mflops;
  double head_fwd_mflops;
  double model_fwd_mflops;
  uint64_t backbone_params;
} fed3r_cost_params;

FED3R_API void fed3r_run_config_init(fed3r_run_config* cfg);
FED3R_API void fed3r_lp_config_init(fed3r_lp_config* cfg);
FED3R_API void fed3r_cost_params_init(fed3r_cost_params* p);

/** Full statistics-collection run. Any of the out parameters may be NULL.
 *  eval_ds, when non-NULL, is the accuracy measurement set (defaults to
 *  the training dataset). */
FED3R_API fed3r_status fed3r_run(const fed3r_dataset* ds,
                                 const fed3r_manifest* manifest,
                                 const fed3r_run_config* cfg,
                                 const fed3r_cost_params* cost,
                                 const fed3r_dataset* eval_ds,
                                 fed3r_trace** out_trace,
                                 fed3r_classifier** out_classifier,
                                 fed3r_stats** out_stats);

/** Linear-probing run (clients drawn with replacement). init_classifier is
 *  required when lp->init is FED3R_LP_INIT_FED3R. */
FED3R_API fed3r_status fed3r_run_lp(const fed3r_dataset* ds,
                                    const fed3r_manifest* manifest,
                                    const fed3r_lp_config* lp,
                                    const fed3r_run_config* cfg,
                                    const fed3r_cost_params* cost,
                                    const fed3r_classifier* init_classifier,
                                    const fed3r_dataset* eval_ds,
                                    fed3r_trace** out_trace,
                                    fed3r_classifier** out_classifier);

/** Federated nearest-class-mean baseline. zero_columns as in normalize. */
FED3R_API fed3r_status fed3r_fedncm(const fed3r_dataset* ds,
                                    const fed3r_manifest* manifest,
                                    uint64_t* zero_columns,
                                    fed3r_classifier** out);

/** Grid search for the softmax temperature minimizing mean training
 *  cross-entropy; ties break toward the smaller value. */
FED3R_API fed3r_status fed3r_calibrate_temperature(const fed3r_classifier* cls,
                                                   const fed3r_dataset* ds,
                                                   const double* grid,
                                                   uint64_t grid_len,
                                                   double* out);

typedef struct {
  uint64_t round;
  uint64_t new_clients;
  uint64_t distinct_clients_cum;
  int has_accuracy;
  double accuracy;
  uint64_t comm_down_bytes_cum;
  uint64_t comm_up_bytes_cum;
  double avg_client_flops_cum;
} fed3r_trace_row;

FED3R_API uint64_t fed3r_trace_rounds(const fed3r_trace* trace);
FED3R_API fed3r_status fed3r_trace_get(const fed3r_trace* trace, uint64_t row,
                                       fed3r_trace_row* out);
FED3R_API void fed3r_trace_destroy(fed3r_trace* trace);

/* ---------------------------------------------------------------------- */
/* Cost calculators                                                       */
/* ---------------------------------------------------------------------- */

/** Per-round per-client transfer volume in FP32 values (bytes = 4x). */
FED3R_API fed3r_status fed3r_comm_per_client(int algorithm,
                                             const fed3r_cost_params* p,
                                             uint64_t* down_values,
                                             uint64_t* up_values);

/** One-time extractor distribution cost, reported separately from ledgers. */
FED3R_API fed3r_status fed3r_bootstrap_down_values(const fed3r_cost_params* p,
                                                   uint64_t* out);

FED3R_API fed3r_status fed3r_compute_per_round(int algorithm,
                                               const fed3r_cost_params* p,
                                               uint64_t samples,
                                               double* out_flops);

/** Expected cumulative per-client cost after t rounds:
 *  flops_per_round * t * clients_per_round / clients. */
FED3R_API fed3r_status fed3r_expected_cumulative(double flops_per_round,
                                                 uint64_t t,
                                                 uint64_t clients_per_round,
                                                 uint64_t clients, double* out);

/* ---------------------------------------------------------------------- */
/* Coverage simulation                                                    */
/* ---------------------------------------------------------------------- */

/** Monte Carlo rounds-to-coverage when drawing clients_per_round distinct
 *  clients per round with replacement across rounds. */
FED3R_API fed3r_status fed3r_coupon_rounds(uint64_t clients,
                                           uint64_t clients_per_round,
                                           const double* fractions,
                                           uint64_t fraction_count,
                                           uint64_t trials, uint64_t seed,
                                           uint64_t threads,
                                           fed3r_coverage** out);

FED3R_API uint64_t fed3r_coverage_fractions(const fed3r_coverage* cov);
FED3R_API fed3r_status fed3r_coverage_get(const fed3r_coverage* cov,
                                          uint64_t index, double* fraction,
                                          double* mean_rounds,
                                          double* std_rounds);
FED3R_API void fed3r_coverage_destroy(fed3r_coverage* cov);

/* ---------------------------------------------------------------------- */
/* File inspection                                                        */
/* ---------------------------------------------------------------------- */

/** Writes a one-line JSON description of a feature, statistics, classifier,
 *  or manifest file header into buf (NUL-terminated, truncated to capacity).
 */
FED3R_API fed3r_status fed3r_inspect(const char* path, char* buf,
                                     size_t capacity);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FED3R_H */

#include "fed3r/fed3r.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <string>

#include <nlohmann/json.hpp>

#include "core/baselines.hpp"
#include "core/cost_model.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/federation.hpp"
#include "core/random_features.hpp"
#include "core/ridge.hpp"
#include "core/sampling_sim.hpp"

using fed3r::Errc;

static_assert(static_cast<int>(Errc::ok) == FED3R_OK);
static_assert(static_cast<int>(Errc::invalid_argument) == FED3R_ERR_INVALID_ARGUMENT);
static_assert(static_cast<int>(Errc::dimension_mismatch) == FED3R_ERR_DIMENSION_MISMATCH);
static_assert(static_cast<int>(Errc::label_out_of_range) == FED3R_ERR_LABEL_OUT_OF_RANGE);
static_assert(static_cast<int>(Errc::not_positive_definite) == FED3R_ERR_NOT_POSITIVE_DEFINITE);
static_assert(static_cast<int>(Errc::empty_dataset) == FED3R_ERR_EMPTY_DATASET);
static_assert(static_cast<int>(Errc::io_failure) == FED3R_ERR_IO);
static_assert(static_cast<int>(Errc::bad_magic) == FED3R_ERR_BAD_MAGIC);
static_assert(static_cast<int>(Errc::version_unsupported) == FED3R_ERR_VERSION_UNSUPPORTED);
static_assert(static_cast<int>(Errc::truncated_file) == FED3R_ERR_TRUNCATED_FILE);
static_assert(static_cast<int>(Errc::invalid_manifest) == FED3R_ERR_INVALID_MANIFEST);
static_assert(static_cast<int>(Errc::too_many_clients) == FED3R_ERR_TOO_MANY_CLIENTS);
static_assert(static_cast<int>(Errc::empty_class) == FED3R_ERR_EMPTY_CLASS);
static_assert(static_cast<int>(Errc::pool_exhausted) == FED3R_ERR_POOL_EXHAUSTED);
static_assert(static_cast<int>(Errc::unknown_algorithm) == FED3R_ERR_UNKNOWN_ALGORITHM);
static_assert(static_cast<int>(Errc::invalid_bandwidth) == FED3R_ERR_INVALID_BANDWIDTH);
static_assert(static_cast<int>(Errc::empty_grid) == FED3R_ERR_EMPTY_GRID);
static_assert(static_cast<int>(Errc::internal) == FED3R_ERR_INTERNAL);

struct fed3r_dataset {
  fed3r::FeatureDataset ds;
};
struct fed3r_manifest {
  fed3r::PartitionManifest m;
};
struct fed3r_stats {
  fed3r::RRStatistics s;
};
struct fed3r_classifier {
  fed3r::Classifier cls;
};
struct fed3r_rff {
  fed3r::RFFMap map;
};
struct fed3r_trace {
  fed3r::TrainingTrace trace;
};
struct fed3r_coverage {
  fed3r::CoverageResult cov;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
fed3r_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return FED3R_OK;
  } catch (const fed3r::Error& e) {
    g_last_error = e.what();
    return static_cast<fed3r_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FED3R_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FED3R_ERR_INTERNAL;
  }
}

void check_ptr(const void* p, const char* what) {
  fed3r::require(p != nullptr, Errc::invalid_argument,
                 std::string(what) + " must not be NULL");
}

fed3r::FederationConfig to_core(const fed3r_run_config& cfg,
                                const fed3r_cost_params* cost) {
  fed3r::FederationConfig out;
  out.clients = cfg.clients;
  out.clients_per_round = cfg.clients_per_round;
  fed3r::require(cfg.sampling == FED3R_SAMPLING_WITHOUT_REPLACEMENT ||
                     cfg.sampling == FED3R_SAMPLING_WITH_REPLACEMENT,
                 Errc::invalid_argument, "unknown sampling mode");
  out.sampling = cfg.sampling == FED3R_SAMPLING_WITHOUT_REPLACEMENT
                     ? fed3r::SamplingMode::without_replacement
                     : fed3r::SamplingMode::with_replacement;
  out.rounds_max = cfg.rounds_max;
  out.ridge_lambda = cfg.ridge_lambda;
  if (cfg.rff_dim > 0) {
    fed3r::RFFConfig rff;
    rff.output_dim = cfg.rff_dim;
    rff.sigma = cfg.rff_sigma;
    if (cfg.rff_has_seed) rff.seed = cfg.rff_seed;
    out.rff = rff;
  }
  out.seed = cfg.seed;
  out.eval_every = cfg.eval_every;
  out.threads = cfg.threads;
  out.charge_rff_transfer = cfg.charge_rff_transfer != 0;
  if (cost) {
    out.cost.local_epochs = cost->local_epochs;
    out.cost.extractor_fwd_mflops = cost->extractor_fwd_mflops;
    out.cost.head_fwd_mflops = cost->head_fwd_mflops;
    out.cost.model_fwd_mflops = cost->model_fwd_mflops;
    out.cost.backbone_params = cost->backbone_params;
  }
  return out;
}

fed3r::CostParams to_core(const fed3r_cost_params& p) {
  fed3r::CostParams out;
  out.feature_dim = p.feature_dim;
  out.classes = p.classes;
  out.rff_dim = p.rff_dim;
  out.local_epochs = p.local_epochs;
  out.clients_per_round = p.clients_per_round;
  out.clients = p.clients;
  out.extractor_fwd_mflops = p.extractor_fwd_mflops;
  out.head_fwd_mflops = p.head_fwd_mflops;
  out.model_fwd_mflops = p.model_fwd_mflops;
  out.backbone_params = p.backbone_params;
  return out;
}

fed3r::Algorithm to_algorithm(int alg) {
  switch (alg) {
    case FED3R_ALG_FED3R: return fed3r::Algorithm::fed3r;
    case FED3R_ALG_FED3R_RF: return fed3r::Algorithm::fed3r_rf;
    case FED3R_ALG_FEDAVG_LP: return fed3r::Algorithm::fedavg_lp;
    case FED3R_ALG_FEDAVGM_LP: return fed3r::Algorithm::fedavgm_lp;
    case FED3R_ALG_FEDAVG_FULL: return fed3r::Algorithm::fedavg_full;
    case FED3R_ALG_FEDAVGM_FULL: return fed3r::Algorithm::fedavgm_full;
    default:
      fed3r::fail(Errc::unknown_algorithm,
                  "unknown algorithm id " + std::to_string(alg));
  }
}

}  // namespace

extern "C" {

const char* fed3r_version(void) { return "0.1.0"; }

const char* fed3r_strerror(fed3r_status code) {
  return fed3r::errc_name(static_cast<Errc>(code));
}

const char* fed3r_last_error(void) { return g_last_error.c_str(); }

/* -------------------------------- dataset ------------------------------ */

fed3r_status fed3r_dataset_create(const double* features, const uint32_t* labels,
                                  uint64_t n, uint64_t dim, uint64_t classes,
                                  fed3r_dataset** out) {
  return guarded([&] {
    check_ptr(out, "out");
    if (n > 0) {
      check_ptr(features, "features");
      check_ptr(labels, "labels");
    }
    auto* h = new fed3r_dataset;
    h->ds.classes = classes;
    h->ds.features = fed3r::Matrix(n, dim);
    if (n > 0) {
      std::memcpy(h->ds.features.data(), features, sizeof(double) * n * dim);
      h->ds.labels.assign(labels, labels + n);
    }
    try {
      fed3r::validate_dataset(h->ds);
    } catch (...) {
      delete h;
      throw;
    }
    *out = h;
  });
}

fed3r_status fed3r_dataset_generate(uint64_t classes, uint64_t dim,
                                    uint64_t per_class, double separation,
                                    double anisotropy, uint64_t seed,
                                    fed3r_dataset** out) {
  return guarded([&] {
    check_ptr(out, "out");
    *out = new fed3r_dataset{fed3r::gen_gaussian_mixture(
        classes, dim, per_class, separation, anisotropy, seed)};
  });
}

fed3r_status fed3r_dataset_read(const char* path, fed3r_dataset** out) {
  return guarded([&] {
    check_ptr(path, "path");
    check_ptr(out, "out");
    *out = new fed3r_dataset{fed3r::read_features(path)};
  });
}

fed3r_status fed3r_dataset_write(const fed3r_dataset* ds, const char* path) {
  return guarded([&] {
    check_ptr(ds, "dataset");
    check_ptr(path, "path");
    fed3r::write_features(path, ds->ds);
  });
}

uint64_t fed3r_dataset_count(const fed3r_dataset* ds) { return ds->ds.count(); }
uint64_t fed3r_dataset_dim(const fed3r_dataset* ds) { return ds->ds.dim(); }
uint64_t fed3r_dataset_classes(const fed3r_dataset* ds) { return ds->ds.classes; }
const double* fed3r_dataset_features(const fed3r_dataset* ds) {
  return ds->ds.features.data();
}
const uint32_t* fed3r_dataset_labels(const fed3r_dataset* ds) {
  return ds->ds.labels.data();
}
void fed3r_dataset_destroy(fed3r_dataset* ds) { delete ds; }

/* ------------------------------- manifest ------------------------------ */

fed3r_status fed3r_manifest_dirichlet(const fed3r_dataset* ds, uint64_t clients,
                                      double alpha, uint64_t seed,
                                      fed3r_manifest** out) {
  return guarded([&] {
    check_ptr(ds, "dataset");
    check_ptr(out, "out");
    *out = new fed3r_manifest{
        fed3r::partition_dirichlet(ds->ds, clients, alpha, seed)};
  });
}

fed3r_status fed3r_manifest_single_class(const fed3r_dataset* ds, uint64_t seed,
                                         uint64_t clients_per_class,
                                         fed3r_manifest** out) {
  return guarded([&] {
    check_ptr(ds, "dataset");
    check_ptr(out, "out");
    *out = new fed3r_manifest{
        fed3r::partition_single_class(ds->ds, seed, clients_per_class)};
  });
}

fed3r_status fed3r_manifest_read(const char* path, fed3r_manifest** out) {
  return guarded([&] {
    check_ptr(path, "path");
    check_ptr(out, "out");
    *out = new fed3r_manifest{fed3r::read_manifest(path)};
  });
}

fed3r_status fed3r_manifest_write(const fed3r_manifest* m, const char* path) {
  return guarded([&] {
    check_ptr(m, "manifest");
    check_ptr(path, "path");
    fed3r::write_manifest(path, m->m);
  });
}

uint64_t fed3r_manifest_clients(const fed3r_manifest* m) {
  return m->m.client_count();
}

uint64_t fed3r_manifest_client_size(const fed3r_manifest* m, uint64_t client) {
  if (client >= m->m.client_count()) return 0;
  return m->m.assignment[client].size();
}

fed3r_status fed3r_manifest_client_indices(const fed3r_manifest* m,
                                           uint64_t client, uint64_t* out,
                                           uint64_t capacity) {
  return guarded([&] {
    check_ptr(m, "manifest");
    check_ptr(out, "out");
    fed3r::require(client < m->m.client_count(), Errc::invalid_argument,
                   "client id out of range");
    const auto& idx = m->m.assignment[client];
    fed3r::require(capacity >= idx.size(), Errc::invalid_argument,
                   "output buffer too small");
    std::memcpy(out, idx.data(), sizeof(uint64_t) * idx.size());
  });
}

void fed3r_manifest_destroy(fed3r_manifest* m) { delete m; }

/* ----------------------------- statistics ------------------------------ */

fed3r_status fed3r_stats_compute(const fed3r_dataset* ds, fed3r_stats** out) {
  return guarded([&] {
    check_ptr(ds, "dataset");
    check_ptr(out, "out");
    *out = new fed3r_stats{fed3r::compute_local_stats(
        ds->ds.features, ds->ds.labels, ds->ds.classes)};
  });
}

fed3r_status fed3r_stats_merge(const fed3r_stats* a, const fed3r_stats* b,
                               fed3r_stats** out) {
  return guarded([&] {
    check_ptr(a, "a");
    check_ptr(b, "b");
    check_ptr(out, "out");
    *out = new fed3r_stats{fed3r::merge_stats(a->s, b->s)};
  });
}

fed3r_status fed3r_stats_read(const char* path, fed3r_stats** out) {
  return guarded([&] {
    check_ptr(path, "path");
    check_ptr(out, "out");
    *out = new fed3r_stats{fed3r::read_stats(path)};
  });
}

fed3r_status fed3r_stats_write(const fed3r_stats* s, const char* path) {
  return guarded([&] {
    check_ptr(s, "stats");
    check_ptr(path, "path");
    fed3r::write_stats(path, s->s);
  });
}

uint64_t fed3r_stats_dim(const fed3r_stats* s) { return s->s.dim; }
uint64_t fed3r_stats_classes(const fed3r_stats* s) { return s->s.classes; }
uint64_t fed3r_stats_count(const fed3r_stats* s) { return s->s.count; }
void fed3r_stats_destroy(fed3r_stats* s) { delete s; }

/* ----------------------------- classifier ------------------------------ */

fed3r_status fed3r_classifier_solve(const fed3r_stats* s, double ridge_lambda,
                                    fed3r_classifier** out) {
  return guarded([&] {
    check_ptr(s, "stats");
    check_ptr(out, "out");
    *out = new fed3r_classifier{fed3r::solve_classifier(s->s, ridge_lambda)};
  });
}

fed3r_status fed3r_classifier_normalize(fed3r_classifier* cls,
                                        uint64_t* zero_columns) {
  return guarded([&] {
    check_ptr(cls, "classifier");
    std::vector<std::size_t> zeros;
    cls->cls = fed3r::normalize_columns(cls->cls, &zeros);
    if (zero_columns) *zero_columns = zeros.size();
  });
}

fed3r_status fed3r_classifier_centralized(const fed3r_dataset* ds,
                                          double ridge_lambda,
                                          fed3r_classifier** out) {
  return guarded([&] {
    check_ptr(ds, "dataset");
    check_ptr(out, "out");
    *out = new fed3r_classifier{fed3r::centralized_rr(
        ds->ds.features, ds->ds.labels, ds->ds.classes, ridge_lambda)};
  });
}

fed3r_status fed3r_classifier_predict(const fed3r_classifier* cls,
                                      const double* features, uint64_t dim,
                                      uint64_t* out) {
  return guarded([&] {
    check_ptr(cls, "classifier");
    check_ptr(features, "features");
    check_ptr(out, "out");
    *out = fed3r::predict(cls->cls, std::span<const double>(features, dim));
  });
}

fed3r_status fed3r_classifier_accuracy(const fed3r_classifier* cls,
                                       const fed3r_dataset* ds, double* out) {
  return guarded([&] {
    check_ptr(cls, "classifier");
    check_ptr(ds, "dataset");
    check_ptr(out, "out");
    *out = fed3r::evaluate_accuracy(cls->cls, ds->ds);
  });
}

fed3r_status fed3r_classifier_read(const char* path, fed3r_classifier** out) {
  return guarded([&] {
    check_ptr(path, "path");
    check_ptr(out, "out");
    *out = new fed3r_classifier{fed3r::read_classifier(path)};
  });
}

fed3r_status fed3r_classifier_write(const fed3r_classifier* cls,
                                    const char* path) {
  return guarded([&] {
    check_ptr(cls, "classifier");
    check_ptr(path, "path");
    fed3r::write_classifier(path, cls->cls);
  });
}

uint64_t fed3r_classifier_dim(const fed3r_classifier* cls) {
  return cls->cls.dim();
}
uint64_t fed3r_classifier_classes(const fed3r_classifier* cls) {
  return cls->cls.classes();
}
double fed3r_classifier_temperature(const fed3r_classifier* cls) {
  return cls->cls.temperature;
}

fed3r_status fed3r_classifier_set_temperature(fed3r_classifier* cls,
                                              double temperature) {
  return guarded([&] {
    check_ptr(cls, "classifier");
    fed3r::require(temperature > 0.0, Errc::invalid_argument,
                   "temperature must be positive");
    cls->cls.temperature = temperature;
  });
}

const double* fed3r_classifier_weights(const fed3r_classifier* cls) {
  return cls->cls.weights.data();
}
void fed3r_classifier_destroy(fed3r_classifier* cls) { delete cls; }

/* --------------------------- random features --------------------------- */

fed3r_status fed3r_rff_sample(uint64_t dim, uint64_t output_dim, double sigma,
                              uint64_t seed, fed3r_rff** out) {
  return guarded([&] {
    check_ptr(out, "out");
    *out = new fed3r_rff{fed3r::sample_rff(dim, output_dim, sigma, seed)};
  });
}

fed3r_status fed3r_rff_apply(const fed3r_rff* map, const fed3r_dataset* ds,
                             fed3r_dataset** out) {
  return guarded([&] {
    check_ptr(map, "map");
    check_ptr(ds, "dataset");
    check_ptr(out, "out");
    auto* h = new fed3r_dataset;
    h->ds.classes = ds->ds.classes;
    h->ds.labels = ds->ds.labels;
    h->ds.features = fed3r::apply_rff(map->map, ds->ds.features);
    *out = h;
  });
}

fed3r_status fed3r_kernel_exact(const double* a, const double* b, uint64_t dim,
                                double sigma, double* out) {
  return guarded([&] {
    check_ptr(a, "a");
    check_ptr(b, "b");
    check_ptr(out, "out");
    *out = fed3r::kernel_exact(std::span<const double>(a, dim),
                               std::span<const double>(b, dim), sigma);
  });
}

void fed3r_rff_destroy(fed3r_rff* map) { delete map; }

/* ------------------------------ federation ----------------------------- */

void fed3r_run_config_init(fed3r_run_config* cfg) {
  *cfg = fed3r_run_config{};
  cfg->clients_per_round = 10;
  cfg->sampling = FED3R_SAMPLING_WITHOUT_REPLACEMENT;
  cfg->ridge_lambda = 0.01;
  cfg->rff_sigma = 1000.0;
  cfg->eval_every = 1;
}

void fed3r_lp_config_init(fed3r_lp_config* cfg) {
  *cfg = fed3r_lp_config{};
  cfg->lr = 0.1;
  cfg->weight_decay = 4e-5;
  cfg->batch_size = 50;
  cfg->local_epochs = 5;
  cfg->server_lr = 1.0;
  cfg->server_momentum = 0.0;
  cfg->rounds = 100;
  cfg->temperature = 1.0;
  cfg->init = FED3R_LP_INIT_RANDOM;
}

void fed3r_cost_params_init(fed3r_cost_params* p) {
  *p = fed3r_cost_params{};
  p->local_epochs = 5;
  p->clients_per_round = 10;
  p->extractor_fwd_mflops = 332.9;
  p->head_fwd_mflops = 2.6;
  p->model_fwd_mflops = 335.5;
  p->backbone_params = 2223872;
}

fed3r_status fed3r_run(const fed3r_dataset* ds, const fed3r_manifest* manifest,
                       const fed3r_run_config* cfg,
                       const fed3r_cost_params* cost,
                       const fed3r_dataset* eval_ds, fed3r_trace** out_trace,
                       fed3r_classifier** out_classifier,
                       fed3r_stats** out_stats) {
  return guarded([&] {
    check_ptr(ds, "dataset");
    check_ptr(manifest, "manifest");
    check_ptr(cfg, "config");
    fed3r::FedRunResult res =
        fed3r::run_fed3r(ds->ds, manifest->m, to_core(*cfg, cost),
                         eval_ds ? &eval_ds->ds : nullptr);
    if (out_trace) *out_trace = new fed3r_trace{std::move(res.trace)};
    if (out_classifier) {
      *out_classifier = new fed3r_classifier{std::move(res.classifier)};
    }
    if (out_stats) *out_stats = new fed3r_stats{std::move(res.statistics)};
  });
}

fed3r_status fed3r_run_lp(const fed3r_dataset* ds, const fed3r_manifest* manifest,
                          const fed3r_lp_config* lp, const fed3r_run_config* cfg,
                          const fed3r_cost_params* cost,
                          const fed3r_classifier* init_classifier,
                          const fed3r_dataset* eval_ds, fed3r_trace** out_trace,
                          fed3r_classifier** out_classifier) {
  return guarded([&] {
    check_ptr(ds, "dataset");
    check_ptr(manifest, "manifest");
    check_ptr(lp, "lp config");
    check_ptr(cfg, "config");
    fed3r::LPConfig lp_cfg;
    lp_cfg.lr = lp->lr;
    lp_cfg.weight_decay = lp->weight_decay;
    lp_cfg.batch_size = lp->batch_size;
    lp_cfg.local_epochs = lp->local_epochs;
    lp_cfg.server_lr = lp->server_lr;
    lp_cfg.server_momentum = lp->server_momentum;
    lp_cfg.rounds = lp->rounds;
    lp_cfg.temperature = lp->temperature;
    fed3r::require(lp->init == FED3R_LP_INIT_RANDOM ||
                       lp->init == FED3R_LP_INIT_FED3R,
                   Errc::invalid_argument, "unknown lp init mode");
    lp_cfg.init = lp->init == FED3R_LP_INIT_RANDOM ? fed3r::LPInit::random
                                                   : fed3r::LPInit::fed3r;
    fed3r::LPRunResult res = fed3r::run_lp(
        ds->ds, manifest->m, lp_cfg, to_core(*cfg, cost),
        init_classifier ? &init_classifier->cls : nullptr,
        eval_ds ? &eval_ds->ds : nullptr);
    if (out_trace) *out_trace = new fed3r_trace{std::move(res.trace)};
    if (out_classifier) {
      *out_classifier = new fed3r_classifier{std::move(res.classifier)};
    }
  });
}

fed3r_status fed3r_fedncm(const fed3r_dataset* ds, const fed3r_manifest* manifest,
                          uint64_t* zero_columns, fed3r_classifier** out) {
  return guarded([&] {
    check_ptr(ds, "dataset");
    check_ptr(manifest, "manifest");
    check_ptr(out, "out");
    std::vector<std::size_t> zeros;
    *out = new fed3r_classifier{fed3r::fedncm_fit(ds->ds, manifest->m, &zeros)};
    if (zero_columns) *zero_columns = zeros.size();
  });
}

fed3r_status fed3r_calibrate_temperature(const fed3r_classifier* cls,
                                         const fed3r_dataset* ds,
                                         const double* grid, uint64_t grid_len,
                                         double* out) {
  return guarded([&] {
    check_ptr(cls, "classifier");
    check_ptr(ds, "dataset");
    check_ptr(out, "out");
    fed3r::require(grid != nullptr && grid_len > 0, Errc::empty_grid,
                   "temperature grid must be nonempty");
    *out = fed3r::calibrate_temperature(
        cls->cls, ds->ds, std::vector<double>(grid, grid + grid_len));
  });
}

uint64_t fed3r_trace_rounds(const fed3r_trace* trace) {
  return trace->trace.rounds.size();
}

fed3r_status fed3r_trace_get(const fed3r_trace* trace, uint64_t row,
                             fed3r_trace_row* out) {
  return guarded([&] {
    check_ptr(trace, "trace");
    check_ptr(out, "out");
    fed3r::require(row < trace->trace.rounds.size(), Errc::invalid_argument,
                   "trace row out of range");
    const fed3r::RoundRecord& r = trace->trace.rounds[row];
    out->round = r.round;
    out->new_clients = r.new_clients;
    out->distinct_clients_cum = r.distinct_clients_cum;
    out->has_accuracy = r.accuracy.has_value() ? 1 : 0;
    out->accuracy = r.accuracy.value_or(0.0);
    out->comm_down_bytes_cum = r.down_bytes_cum;
    out->comm_up_bytes_cum = r.up_bytes_cum;
    out->avg_client_flops_cum = r.avg_client_flops_cum;
  });
}

void fed3r_trace_destroy(fed3r_trace* trace) { delete trace; }

/* --------------------------------- costs ------------------------------- */

fed3r_status fed3r_comm_per_client(int algorithm, const fed3r_cost_params* p,
                                   uint64_t* down_values, uint64_t* up_values) {
  return guarded([&] {
    check_ptr(p, "cost params");
    const fed3r::CommValues v =
        fed3r::comm_per_client(to_algorithm(algorithm), to_core(*p));
    if (down_values) *down_values = v.down_values;
    if (up_values) *up_values = v.up_values;
  });
}

fed3r_status fed3r_bootstrap_down_values(const fed3r_cost_params* p,
                                         uint64_t* out) {
  return guarded([&] {
    check_ptr(p, "cost params");
    check_ptr(out, "out");
    *out = fed3r::bootstrap_down_values(to_core(*p));
  });
}

fed3r_status fed3r_compute_per_round(int algorithm, const fed3r_cost_params* p,
                                     uint64_t samples, double* out_flops) {
  return guarded([&] {
    check_ptr(p, "cost params");
    check_ptr(out_flops, "out_flops");
    *out_flops = fed3r::compute_per_round_per_client(to_algorithm(algorithm),
                                                     to_core(*p), samples);
  });
}

fed3r_status fed3r_expected_cumulative(double flops_per_round, uint64_t t,
                                       uint64_t clients_per_round,
                                       uint64_t clients, double* out) {
  return guarded([&] {
    check_ptr(out, "out");
    *out = fed3r::expected_cumulative_per_client(flops_per_round, t,
                                                 clients_per_round, clients);
  });
}

/* -------------------------------- coupon ------------------------------- */

fed3r_status fed3r_coupon_rounds(uint64_t clients, uint64_t clients_per_round,
                                 const double* fractions,
                                 uint64_t fraction_count, uint64_t trials,
                                 uint64_t seed, uint64_t threads,
                                 fed3r_coverage** out) {
  return guarded([&] {
    check_ptr(out, "out");
    fed3r::require(fractions != nullptr && fraction_count > 0,
                   Errc::invalid_argument, "need at least one fraction");
    *out = new fed3r_coverage{fed3r::coupon_rounds(
        clients, clients_per_round,
        std::vector<double>(fractions, fractions + fraction_count), trials,
        seed, threads)};
  });
}

uint64_t fed3r_coverage_fractions(const fed3r_coverage* cov) {
  return cov->cov.fractions.size();
}

fed3r_status fed3r_coverage_get(const fed3r_coverage* cov, uint64_t index,
                                double* fraction, double* mean_rounds,
                                double* std_rounds) {
  return guarded([&] {
    check_ptr(cov, "coverage");
    fed3r::require(index < cov->cov.fractions.size(), Errc::invalid_argument,
                   "coverage index out of range");
    if (fraction) *fraction = cov->cov.fractions[index];
    if (mean_rounds) *mean_rounds = cov->cov.mean_rounds[index];
    if (std_rounds) *std_rounds = cov->cov.std_rounds[index];
  });
}

void fed3r_coverage_destroy(fed3r_coverage* cov) { delete cov; }

/* -------------------------------- inspect ------------------------------ */

fed3r_status fed3r_inspect(const char* path, char* buf, size_t capacity) {
  return guarded([&] {
    check_ptr(path, "path");
    check_ptr(buf, "buf");
    fed3r::require(capacity > 0, Errc::invalid_argument,
                   "buffer capacity must be positive");

    std::ifstream in(path, std::ios::binary);
    fed3r::require(static_cast<bool>(in), Errc::io_failure,
                   std::string(path) + ": cannot open for reading");
    char magic[4] = {};
    in.read(magic, 4);
    fed3r::require(in.gcount() == 4, Errc::truncated_file,
                   std::string(path) + ": too short");
    in.close();

    nlohmann::ordered_json j;
    if (std::memcmp(magic, "F3RD", 4) == 0) {
      const fed3r::FeatureDataset ds = fed3r::read_features(path);
      j = {{"kind", "features"},
           {"samples", ds.count()},
           {"dim", ds.dim()},
           {"classes", ds.classes}};
    } else if (std::memcmp(magic, "F3RS", 4) == 0) {
      const fed3r::RRStatistics s = fed3r::read_stats(path);
      j = {{"kind", "statistics"},
           {"dim", s.dim},
           {"classes", s.classes},
           {"count", s.count}};
    } else if (std::memcmp(magic, "F3RC", 4) == 0) {
      const fed3r::Classifier c = fed3r::read_classifier(path);
      j = {{"kind", "classifier"},
           {"dim", c.dim()},
           {"classes", c.classes()},
           {"temperature", c.temperature},
           {"normalized", c.normalized}};
    } else if (magic[0] == '{') {
      const fed3r::PartitionManifest m = fed3r::read_manifest(path);
      j = {{"kind", "manifest"},
           {"scheme", m.scheme},
           {"alpha", m.alpha},
           {"seed", m.seed},
           {"clients", m.client_count()},
           {"samples", m.total_samples()}};
    } else {
      fed3r::fail(Errc::bad_magic,
                  std::string(path) + ": unrecognized file magic");
    }
    const std::string text = j.dump();
    std::strncpy(buf, text.c_str(), capacity - 1);
    buf[capacity - 1] = '\0';
  });
}

} /* extern "C" */

// Experiment runner for the fed3r shared library. Subcommands:
//   gen      synthesize a feature file and a partition manifest
//   run      execute one federated training run, emit metrics + checkpoints
//   coupon   rounds-to-coverage table for with-replacement sampling
//   inspect  print the header of a feature/statistics/classifier/manifest file
//
// Exit codes: 0 success, 1 config/validation error, 2 I/O error,
// 3 numerical failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fed3r/fed3r.h"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumerical = 3;

int exit_code_for(fed3r_status status) {
  switch (status) {
    case FED3R_OK:
      return 0;
    case FED3R_ERR_IO:
    case FED3R_ERR_BAD_MAGIC:
    case FED3R_ERR_VERSION_UNSUPPORTED:
    case FED3R_ERR_TRUNCATED_FILE:
    case FED3R_ERR_INVALID_MANIFEST:
      return kExitIo;
    case FED3R_ERR_NOT_POSITIVE_DEFINITE:
    case FED3R_ERR_INTERNAL:
      return kExitNumerical;
    default:
      return kExitConfig;
  }
}

struct CliError {
  int code;
  std::string message;
};

void raise(fed3r_status status, const std::string& context) {
  throw CliError{exit_code_for(status),
                 context + ": " + fed3r_strerror(status) + " (" +
                     fed3r_last_error() + ")"};
}

void check(fed3r_status status, const std::string& context) {
  if (status != FED3R_OK) raise(status, context);
}

// RAII wrappers over the C handles.
template <typename T, void (*Destroy)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  explicit Handle(T* p) : ptr(p) {}
  ~Handle() { reset(); }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
  Handle& operator=(Handle&& other) noexcept {
    if (this != &other) {
      reset();
      ptr = other.ptr;
      other.ptr = nullptr;
    }
    return *this;
  }
  void reset() {
    if (ptr) Destroy(ptr);
    ptr = nullptr;
  }
  T** out() {
    reset();
    return &ptr;
  }
  T* get() const { return ptr; }
  explicit operator bool() const { return ptr != nullptr; }
};

using DatasetHandle = Handle<fed3r_dataset, fed3r_dataset_destroy>;
using ManifestHandle = Handle<fed3r_manifest, fed3r_manifest_destroy>;
using ClassifierHandle = Handle<fed3r_classifier, fed3r_classifier_destroy>;
using StatsHandle = Handle<fed3r_stats, fed3r_stats_destroy>;
using TraceHandle = Handle<fed3r_trace, fed3r_trace_destroy>;
using CoverageHandle = Handle<fed3r_coverage, fed3r_coverage_destroy>;

void atomic_write(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CliError{kExitIo, tmp + ": cannot open for writing"};
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw CliError{kExitIo, tmp + ": write failed"};
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CliError{kExitIo, path + ": rename failed: " + ec.message()};
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

/* ------------------------------- run ----------------------------------- */

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{kExitIo, path + ": cannot open config"};
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw CliError{kExitConfig, path + ": invalid JSON: " + e.what()};
  }
}

// Dotted-path override, value parsed as JSON when possible ("flags win").
void apply_override(json& cfg, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) {
    throw CliError{kExitConfig, "override must look like key.path=value: " + spec};
  }
  const std::string path = spec.substr(0, eq);
  const std::string raw = spec.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;  // plain string
  }
  json* node = &cfg;
  std::stringstream ss(path);
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(ss, key, '.')) keys.push_back(key);
  if (keys.empty()) throw CliError{kExitConfig, "empty override path"};
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    node = &(*node)[keys[i]];
  }
  (*node)[keys.back()] = value;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw CliError{kExitConfig,
                   std::string("config field '") + key + "': " + e.what()};
  }
}

const json& subobject(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key) || j.at(key).is_null()) return empty;
  if (!j.at(key).is_object()) {
    throw CliError{kExitConfig, std::string("config field '") + key +
                                    "' must be an object"};
  }
  return j.at(key);
}

struct ResolvedRun {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::uint64_t threads = 0;

  DatasetHandle dataset;
  ManifestHandle manifest;
  DatasetHandle eval_dataset;  // optional

  fed3r_run_config run_cfg{};
  fed3r_lp_config lp_cfg{};
  fed3r_cost_params cost{};
  bool lp_calibrate = true;
  std::vector<double> temperature_grid;
  ordered_json resolved;  // full config echo for run_meta.json
};

ResolvedRun resolve_run(const json& cfg) {
  ResolvedRun r;
  r.algorithm = get_or<std::string>(cfg, "algorithm", "fed3r");
  r.seed = get_or<std::uint64_t>(cfg, "seed", 0);
  r.out_dir = get_or<std::string>(cfg, "out_dir", "fed3r_run");
  r.threads = get_or<std::uint64_t>(cfg, "threads", 0);

  const bool is_lp = r.algorithm == "fedavg_lp" || r.algorithm == "fedavgm_lp";
  const bool is_rf = r.algorithm == "fed3r_rf";
  if (!is_lp && !is_rf && r.algorithm != "fed3r" && r.algorithm != "fedncm") {
    throw CliError{kExitConfig, "unknown algorithm: " + r.algorithm};
  }

  // Data: either files or a synthetic recipe plus a partition scheme.
  const json& data = subobject(cfg, "data");
  const json& synthetic = subobject(cfg, "synthetic");
  const json& partition = subobject(cfg, "partition");
  if (data.contains("features")) {
    const auto features = data.at("features").get<std::string>();
    check(fed3r_dataset_read(features.c_str(), r.dataset.out()), features);
    const auto manifest_path = get_or<std::string>(data, "manifest", "");
    if (manifest_path.empty()) {
      throw CliError{kExitConfig, "data.manifest is required with data.features"};
    }
    check(fed3r_manifest_read(manifest_path.c_str(), r.manifest.out()),
          manifest_path);
    const auto eval_path = get_or<std::string>(data, "eval_features", "");
    if (!eval_path.empty()) {
      check(fed3r_dataset_read(eval_path.c_str(), r.eval_dataset.out()),
            eval_path);
    }
  } else if (!synthetic.empty()) {
    const auto classes = get_or<std::uint64_t>(synthetic, "classes", 10);
    const auto dim = get_or<std::uint64_t>(synthetic, "dim", 64);
    const auto per_class = get_or<std::uint64_t>(synthetic, "per_class", 100);
    const double separation = get_or<double>(synthetic, "separation", 6.0);
    const double anisotropy = get_or<double>(synthetic, "anisotropy", 1.0);
    check(fed3r_dataset_generate(classes, dim, per_class, separation,
                                 anisotropy, r.seed, r.dataset.out()),
          "synthetic dataset");
    const auto scheme = get_or<std::string>(partition, "scheme", "dirichlet");
    const double alpha = get_or<double>(partition, "alpha", 1.0);
    if (scheme == "single_class" || alpha == 0.0) {
      const auto per = get_or<std::uint64_t>(partition, "clients_per_class", 1);
      check(fed3r_manifest_single_class(r.dataset.get(), r.seed, per,
                                        r.manifest.out()),
            "single-class partition");
    } else if (scheme == "dirichlet") {
      const auto clients = get_or<std::uint64_t>(partition, "clients", 50);
      check(fed3r_manifest_dirichlet(r.dataset.get(), clients, alpha, r.seed,
                                     r.manifest.out()),
            "dirichlet partition");
    } else {
      throw CliError{kExitConfig, "unknown partition scheme: " + scheme};
    }
  } else {
    throw CliError{kExitConfig,
                   "config needs either data.features or a synthetic block"};
  }

  fed3r_run_config_init(&r.run_cfg);
  const json& fed = subobject(cfg, "federation");
  r.run_cfg.clients = get_or<std::uint64_t>(fed, "clients", 0);
  r.run_cfg.clients_per_round =
      get_or<std::uint64_t>(fed, "clients_per_round", 10);
  const auto sampling =
      get_or<std::string>(fed, "sampling", "without_replacement");
  if (sampling == "without_replacement") {
    r.run_cfg.sampling = FED3R_SAMPLING_WITHOUT_REPLACEMENT;
  } else if (sampling == "with_replacement") {
    r.run_cfg.sampling = FED3R_SAMPLING_WITH_REPLACEMENT;
  } else {
    throw CliError{kExitConfig, "unknown sampling mode: " + sampling};
  }
  r.run_cfg.rounds_max = get_or<std::uint64_t>(fed, "rounds_max", 0);
  r.run_cfg.ridge_lambda = get_or<double>(fed, "ridge_lambda", 0.01);
  r.run_cfg.eval_every = get_or<std::uint64_t>(fed, "eval_every", 1);
  r.run_cfg.seed = r.seed;
  r.run_cfg.threads = r.threads;

  const json& rff = subobject(cfg, "rff");
  if (is_rf) {
    r.run_cfg.rff_dim = get_or<std::uint64_t>(rff, "output_dim", 512);
    r.run_cfg.rff_sigma = get_or<double>(rff, "sigma", 1000.0);
    if (rff.contains("seed") && !rff.at("seed").is_null()) {
      r.run_cfg.rff_has_seed = 1;
      r.run_cfg.rff_seed = rff.at("seed").get<std::uint64_t>();
    }
    r.run_cfg.charge_rff_transfer =
        get_or<bool>(rff, "charge_transfer", false) ? 1 : 0;
  }

  fed3r_lp_config_init(&r.lp_cfg);
  const json& lp = subobject(cfg, "lp");
  r.lp_cfg.lr = get_or<double>(lp, "lr", 0.1);
  r.lp_cfg.weight_decay = get_or<double>(lp, "weight_decay", 4e-5);
  r.lp_cfg.batch_size = get_or<std::uint64_t>(lp, "batch_size", 50);
  r.lp_cfg.local_epochs = get_or<std::uint64_t>(lp, "local_epochs", 5);
  r.lp_cfg.server_lr = get_or<double>(lp, "server_lr", 1.0);
  r.lp_cfg.server_momentum = get_or<double>(
      lp, "server_momentum", r.algorithm == "fedavgm_lp" ? 0.9 : 0.0);
  r.lp_cfg.rounds = get_or<std::uint64_t>(lp, "rounds", 100);
  r.lp_cfg.temperature = get_or<double>(lp, "temperature", 1.0);
  const auto init = get_or<std::string>(lp, "init", "random");
  if (init == "random") {
    r.lp_cfg.init = FED3R_LP_INIT_RANDOM;
  } else if (init == "fed3r") {
    r.lp_cfg.init = FED3R_LP_INIT_FED3R;
  } else {
    throw CliError{kExitConfig, "unknown lp init: " + init};
  }
  r.lp_calibrate = get_or<bool>(lp, "calibrate_temperature", true);
  r.temperature_grid = get_or<std::vector<double>>(
      lp, "temperature_grid",
      std::vector<double>{0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0});

  fed3r_cost_params_init(&r.cost);
  const json& cost = subobject(cfg, "cost");
  r.cost.extractor_fwd_mflops =
      get_or<double>(cost, "extractor_fwd_mflops", 332.9);
  r.cost.head_fwd_mflops = get_or<double>(cost, "head_fwd_mflops", 2.6);
  r.cost.model_fwd_mflops = get_or<double>(cost, "model_fwd_mflops", 335.5);
  r.cost.backbone_params =
      get_or<std::uint64_t>(cost, "backbone_params", 2223872);
  r.cost.local_epochs = r.lp_cfg.local_epochs;

  // Echo of everything the run actually uses.
  r.resolved["algorithm"] = r.algorithm;
  r.resolved["seed"] = r.seed;
  r.resolved["out_dir"] = r.out_dir;
  r.resolved["threads"] = r.threads;
  r.resolved["dataset"] = {{"samples", fed3r_dataset_count(r.dataset.get())},
                           {"dim", fed3r_dataset_dim(r.dataset.get())},
                           {"classes", fed3r_dataset_classes(r.dataset.get())}};
  if (!synthetic.empty()) r.resolved["synthetic"] = synthetic;
  if (!partition.empty()) r.resolved["partition"] = partition;
  if (!data.empty()) r.resolved["data"] = data;
  r.resolved["federation"] = {
      {"clients", fed3r_manifest_clients(r.manifest.get())},
      {"clients_per_round", r.run_cfg.clients_per_round},
      {"sampling", sampling},
      {"rounds_max", r.run_cfg.rounds_max},
      {"ridge_lambda", r.run_cfg.ridge_lambda},
      {"eval_every", r.run_cfg.eval_every}};
  if (is_rf) {
    r.resolved["rff"] = {
        {"output_dim", r.run_cfg.rff_dim},
        {"sigma", r.run_cfg.rff_sigma},
        {"seed", r.run_cfg.rff_has_seed ? json(r.run_cfg.rff_seed) : json()},
        {"charge_transfer", r.run_cfg.charge_rff_transfer != 0}};
  }
  if (is_lp) {
    r.resolved["lp"] = {{"lr", r.lp_cfg.lr},
                        {"weight_decay", r.lp_cfg.weight_decay},
                        {"batch_size", r.lp_cfg.batch_size},
                        {"local_epochs", r.lp_cfg.local_epochs},
                        {"server_lr", r.lp_cfg.server_lr},
                        {"server_momentum", r.lp_cfg.server_momentum},
                        {"rounds", r.lp_cfg.rounds},
                        {"temperature", r.lp_cfg.temperature},
                        {"init", init},
                        {"calibrate_temperature", r.lp_calibrate},
                        {"temperature_grid", r.temperature_grid}};
  }
  r.resolved["cost"] = {{"extractor_fwd_mflops", r.cost.extractor_fwd_mflops},
                        {"head_fwd_mflops", r.cost.head_fwd_mflops},
                        {"model_fwd_mflops", r.cost.model_fwd_mflops},
                        {"backbone_params", r.cost.backbone_params},
                        {"bytes_per_value", 4}};
  return r;
}

std::string trace_to_csv(const fed3r_trace* trace) {
  std::string csv =
      "round,new_clients,distinct_clients_cum,accuracy,"
      "comm_down_bytes_cum,comm_up_bytes_cum,avg_client_flops_cum\n";
  const std::uint64_t rounds = fed3r_trace_rounds(trace);
  for (std::uint64_t i = 0; i < rounds; ++i) {
    fed3r_trace_row row{};
    check(fed3r_trace_get(trace, i, &row), "trace row");
    csv += std::to_string(row.round);
    csv += ',';
    csv += std::to_string(row.new_clients);
    csv += ',';
    csv += std::to_string(row.distinct_clients_cum);
    csv += ',';
    if (row.has_accuracy) csv += fmt_double(row.accuracy);
    csv += ',';
    csv += std::to_string(row.comm_down_bytes_cum);
    csv += ',';
    csv += std::to_string(row.comm_up_bytes_cum);
    csv += ',';
    csv += fmt_double(row.avg_client_flops_cum);
    csv += '\n';
  }
  return csv;
}

int cmd_run(const std::string& config_path,
            const std::vector<std::string>& overrides,
            std::optional<std::uint64_t> threads_flag) {
  json cfg = load_config(config_path);
  for (const auto& o : overrides) apply_override(cfg, o);
  if (threads_flag) {
    cfg["threads"] = *threads_flag;
  } else if (const char* env = std::getenv("FED3R_THREADS")) {
    cfg["threads"] = std::strtoull(env, nullptr, 10);
  }

  ResolvedRun r = resolve_run(cfg);

  TraceHandle trace;
  ClassifierHandle classifier;
  StatsHandle stats;
  ordered_json meta = r.resolved;
  meta["version"] = fed3r_version();
  // Conventions baked into this runner, recorded so results are auditable.
  meta["decisions"] = {
      {"aggregation_order", "ascending client id"},
      {"normalize_at_eval", true},
      {"normalize_before_ft_init", true},
      {"rff_estimator", "cos_phase"},
      {"rff_map_transfer_costed", r.run_cfg.charge_rff_transfer != 0},
      {"rf_projection_flops_included", true},
      {"duplicate_uploads_recompute", false},
      {"ft_weight_decay_applied", true},
      {"argmax_tie_break", "lowest class index"},
      {"seed_derivation", "seed XOR fnv1a64(role string)"}};

  if (r.algorithm == "fed3r" || r.algorithm == "fed3r_rf") {
    check(fed3r_run(r.dataset.get(), r.manifest.get(), &r.run_cfg, &r.cost,
                    r.eval_dataset.get(), trace.out(), classifier.out(),
                    stats.out()),
          "federated run");
  } else if (r.algorithm == "fedncm") {
    uint64_t zero_columns = 0;
    check(fed3r_fedncm(r.dataset.get(), r.manifest.get(), &zero_columns,
                       classifier.out()),
          "fedncm fit");
    double acc = 0.0;
    check(fed3r_classifier_accuracy(
              classifier.get(),
              r.eval_dataset ? r.eval_dataset.get() : r.dataset.get(), &acc),
          "fedncm accuracy");
    meta["fedncm"] = {{"zero_columns", zero_columns}, {"accuracy", acc}};
  } else {
    ClassifierHandle init;
    if (r.lp_cfg.init == FED3R_LP_INIT_FED3R) {
      // Stage one: collect statistics once over the whole federation.
      fed3r_run_config boot = r.run_cfg;
      boot.sampling = FED3R_SAMPLING_WITHOUT_REPLACEMENT;
      boot.rounds_max = 0;
      boot.eval_every = 0;
      check(fed3r_run(r.dataset.get(), r.manifest.get(), &boot, &r.cost,
                      nullptr, nullptr, init.out(), nullptr),
            "fed3r initialization");
      if (r.lp_calibrate && !r.temperature_grid.empty()) {
        double tau = 0.0;
        check(fed3r_calibrate_temperature(
                  init.get(), r.dataset.get(), r.temperature_grid.data(),
                  r.temperature_grid.size(), &tau),
              "temperature calibration");
        r.lp_cfg.temperature = tau;
        meta["lp"]["calibrated_temperature"] = tau;
      }
    }
    check(fed3r_run_lp(r.dataset.get(), r.manifest.get(), &r.lp_cfg,
                       &r.run_cfg, &r.cost, init.get(), r.eval_dataset.get(),
                       trace.out(), classifier.out()),
          "linear-probing run");
  }

  std::error_code ec;
  std::filesystem::create_directories(r.out_dir, ec);
  if (ec) throw CliError{kExitIo, r.out_dir + ": cannot create: " + ec.message()};

  if (trace) {
    atomic_write(r.out_dir + "/metrics.csv", trace_to_csv(trace.get()));
  } else {
    // One-shot algorithms still get a metrics file with their final accuracy.
    double acc = meta["fedncm"]["accuracy"].get<double>();
    std::string csv =
        "round,new_clients,distinct_clients_cum,accuracy,"
        "comm_down_bytes_cum,comm_up_bytes_cum,avg_client_flops_cum\n1," +
        std::to_string(fed3r_manifest_clients(r.manifest.get())) + "," +
        std::to_string(fed3r_manifest_clients(r.manifest.get())) + "," +
        fmt_double(acc) + ",0,0,0\n";
    atomic_write(r.out_dir + "/metrics.csv", csv);
  }
  if (classifier) {
    check(fed3r_classifier_write(classifier.get(),
                                 (r.out_dir + "/classifier.f3rc").c_str()),
          "classifier checkpoint");
  }
  if (stats) {
    check(fed3r_stats_write(stats.get(), (r.out_dir + "/stats.f3rs").c_str()),
          "statistics checkpoint");
  }
  atomic_write(r.out_dir + "/run_meta.json", meta.dump(2) + "\n");
  std::cout << r.out_dir << "/metrics.csv written\n";
  return 0;
}

/* ------------------------------- gen ------------------------------------ */

int cmd_gen(std::uint64_t classes, std::uint64_t dim, std::uint64_t per_class,
            double separation, double anisotropy, std::uint64_t clients,
            double alpha, std::uint64_t seed, const std::string& features_path,
            const std::string& manifest_path) {
  DatasetHandle ds;
  check(fed3r_dataset_generate(classes, dim, per_class, separation, anisotropy,
                               seed, ds.out()),
        "dataset generation");
  ManifestHandle manifest;
  if (alpha == 0.0) {
    check(fed3r_manifest_single_class(ds.get(), seed, 1, manifest.out()),
          "single-class partition");
  } else {
    check(fed3r_manifest_dirichlet(ds.get(), clients, alpha, seed,
                                   manifest.out()),
          "dirichlet partition");
  }
  check(fed3r_dataset_write(ds.get(), features_path.c_str()), features_path);
  check(fed3r_manifest_write(manifest.get(), manifest_path.c_str()),
        manifest_path);
  std::cout << features_path << ": " << fed3r_dataset_count(ds.get())
            << " samples, " << fed3r_manifest_clients(manifest.get())
            << " clients\n";
  return 0;
}

/* ------------------------------ coupon ---------------------------------- */

int cmd_coupon(std::uint64_t clients, std::uint64_t per_round,
               std::vector<double> fractions, std::uint64_t trials,
               std::uint64_t seed, std::uint64_t threads,
               const std::string& out_path) {
  if (fractions.empty()) fractions = {0.25, 0.5, 0.75, 1.0};
  CoverageHandle cov;
  check(fed3r_coupon_rounds(clients, per_round, fractions.data(),
                            fractions.size(), trials, seed, threads,
                            cov.out()),
        "coupon simulation");
  std::string csv = "fraction,mean_rounds,std_rounds\n";
  for (std::uint64_t i = 0; i < fed3r_coverage_fractions(cov.get()); ++i) {
    double f = 0, mean = 0, sd = 0;
    check(fed3r_coverage_get(cov.get(), i, &f, &mean, &sd), "coverage row");
    csv += fmt_double(f) + "," + fmt_double(mean) + "," + fmt_double(sd) + "\n";
  }
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    atomic_write(out_path, csv);
    std::cout << out_path << " written\n";
  }
  return 0;
}

/* ------------------------------ inspect --------------------------------- */

int cmd_inspect(const std::string& path) {
  char buf[4096];
  check(fed3r_inspect(path.c_str(), buf, sizeof(buf)), path);
  std::cout << buf << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fed3r: federated closed-form ridge classification simulator"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "execute a configured training run");
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> threads_flag;
  run->add_option("-c,--config", config_path, "JSON run configuration")
      ->required();
  run->add_option("--override", overrides,
                  "dotted.path=value config override (repeatable; flags win)");
  run->add_option("--threads", threads_flag,
                  "worker threads (0 = hardware; FED3R_THREADS mirrors this)");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic feature file");
  std::uint64_t g_classes = 10, g_dim = 64, g_per_class = 100, g_clients = 50,
                g_seed = 0;
  double g_separation = 6.0, g_anisotropy = 1.0, g_alpha = 1.0;
  std::string g_features = "features.f3rd", g_manifest = "manifest.json";
  gen->add_option("--classes", g_classes, "number of classes");
  gen->add_option("--dim", g_dim, "feature dimensionality");
  gen->add_option("--per-class", g_per_class, "samples per class");
  gen->add_option("--separation", g_separation, "class mean separation");
  gen->add_option("--anisotropy", g_anisotropy, "covariance condition number");
  gen->add_option("--clients", g_clients, "client count (dirichlet split)");
  gen->add_option("--alpha", g_alpha,
                  "dirichlet concentration; 0 selects the single-class split");
  gen->add_option("--seed", g_seed, "global seed");
  gen->add_option("--features", g_features, "output feature file");
  gen->add_option("--manifest", g_manifest, "output manifest file");

  // coupon
  auto* coupon =
      app.add_subcommand("coupon", "rounds-to-coverage simulation table");
  std::uint64_t c_clients = 100, c_per_round = 10, c_trials = 1000, c_seed = 0,
                c_threads = 0;
  std::vector<double> c_fractions;
  std::string c_out;
  coupon->add_option("--clients", c_clients, "federation size K");
  coupon->add_option("--per-round", c_per_round, "clients drawn per round");
  coupon->add_option("--fractions", c_fractions,
                     "coverage fractions (default 0.25 0.5 0.75 1.0)");
  coupon->add_option("--trials", c_trials, "Monte Carlo trials");
  coupon->add_option("--seed", c_seed, "simulation seed");
  coupon->add_option("--threads", c_threads, "worker threads");
  coupon->add_option("-o,--out", c_out, "output CSV (default stdout)");

  // inspect
  auto* inspect = app.add_subcommand("inspect", "print a file header as JSON");
  std::string i_path;
  inspect->add_option("path", i_path, "file to inspect")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, overrides, threads_flag);
    if (gen->parsed()) {
      return cmd_gen(g_classes, g_dim, g_per_class, g_separation, g_anisotropy,
                     g_clients, g_alpha, g_seed, g_features, g_manifest);
    }
    if (coupon->parsed()) {
      return cmd_coupon(c_clients, c_per_round, c_fractions, c_trials, c_seed,
                        c_threads, c_out);
    }
    if (inspect->parsed()) return cmd_inspect(i_path);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}

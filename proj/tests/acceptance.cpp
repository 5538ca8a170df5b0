// Acceptance suite: one check per numbered release criterion, each printed as
// a [PASS]/[FAIL] line with its runtime. Exits nonzero if any check fails.
//
// Criterion 12 drives the installed CLI binary (path in $FED3R_CLI, set by
// ctest) to verify byte-identical reruns end to end.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "core/baselines.hpp"
#include "core/cost_model.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/federation.hpp"
#include "core/random_features.hpp"
#include "core/ridge.hpp"
#include "core/sampling_sim.hpp"

using namespace fed3r;

namespace {

struct Checker {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

FederationConfig fed_config(std::size_t per_round, std::uint64_t seed,
                            std::size_t eval_every = 0) {
  FederationConfig cfg;
  cfg.clients_per_round = per_round;
  cfg.ridge_lambda = 0.01;
  cfg.seed = seed;
  cfg.eval_every = eval_every;
  cfg.threads = 0;
  return cfg;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/* 1. Federated and centralized solutions agree on every partition and
      sampling order. */
void criterion_equivalence(Checker& c) {
  const FeatureDataset ds = gen_gaussian_mixture(10, 64, 500, 6.0, 1.0, 1);
  const Classifier central =
      centralized_rr(ds.features, ds.labels, ds.classes, 0.01);
  for (std::uint64_t pseed = 1; pseed <= 5; ++pseed) {
    const PartitionManifest m = partition_dirichlet(ds, 50, 0.5, pseed);
    for (std::uint64_t sseed : {11, 22, 33}) {
      const FedRunResult res = run_fed3r(ds, m, fed_config(10, sseed));
      const double diff =
          rel_frobenius_diff(res.classifier.weights, central.weights);
      c.expect(diff <= 1e-6, "partition " + std::to_string(pseed) + " order " +
                                 std::to_string(sseed) + " diff " + fmt(diff));
    }
  }
}

/* 2. One dataset, four heterogeneity regimes, identical solutions. */
void criterion_heterogeneity(Checker& c) {
  const FeatureDataset ds = gen_gaussian_mixture(10, 64, 500, 6.0, 1.0, 1);
  std::vector<PartitionManifest> manifests;
  manifests.push_back(partition_single_class(ds, 7));
  for (double alpha : {0.1, 1.0, 100.0}) {
    manifests.push_back(partition_dirichlet(ds, 50, alpha, 7));
  }

  std::vector<Matrix> weights;
  std::vector<double> accuracies;
  for (const auto& m : manifests) {
    const std::size_t per_round = std::min<std::size_t>(10, m.client_count());
    const FedRunResult res = run_fed3r(ds, m, fed_config(per_round, 5));
    weights.push_back(res.classifier.weights);
    accuracies.push_back(*res.trace.rounds.back().accuracy);
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    for (std::size_t j = i + 1; j < weights.size(); ++j) {
      const double diff = rel_frobenius_diff(weights[i], weights[j]);
      c.expect(diff <= 1e-6, "pair (" + std::to_string(i) + "," +
                                 std::to_string(j) + ") diff " + fmt(diff));
      const double ai = std::round(accuracies[i] * 1e4);
      const double aj = std::round(accuracies[j] * 1e4);
      c.expect(ai == aj, "accuracies differ at 4 decimals: " +
                             fmt(accuracies[i]) + " vs " + fmt(accuracies[j]));
    }
  }
}

/* 3. Without replacement, every (K, kappa) cell finishes in exactly
      ceil(K / kappa) rounds. */
void criterion_round_count(Checker& c) {
  const FeatureDataset ds = gen_gaussian_mixture(2, 4, 1300, 3.0, 1.0, 3);
  for (std::size_t clients : {10, 25, 100, 1262}) {
    const PartitionManifest m = partition_dirichlet(ds, clients, 1.0, 5);
    for (std::size_t kappa : {1, 7, 10, 50}) {
      const std::size_t effective = std::min(kappa, clients);
      const FedRunResult res = run_fed3r(ds, m, fed_config(effective, 9));
      const std::size_t want = (clients + kappa - 1) / kappa;
      c.expect(res.trace.rounds.size() == want,
               "K=" + std::to_string(clients) + " kappa=" +
                   std::to_string(kappa) + ": got " +
                   std::to_string(res.trace.rounds.size()) + " want " +
                   std::to_string(want));
      c.expect(res.trace.rounds.back().distinct_clients_cum == clients,
               "K=" + std::to_string(clients) + ": incomplete coverage");
    }
  }
}

/* 4. Random-feature dot products approximate the exact kernel, and the
      error shrinks with the output dimension. */
void criterion_rff_fidelity(Checker& c) {
  const std::size_t dim = 16;
  const double sigma = 2.0;
  const std::size_t pairs = 100;

  Rng rng(17);
  std::vector<std::vector<double>> as(pairs), bs(pairs);
  for (std::size_t p = 0; p < pairs; ++p) {
    as[p].resize(dim);
    bs[p].resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      as[p][j] = rng.normal() * sigma;
      bs[p][j] = rng.normal() * sigma;
    }
  }

  std::vector<double> errors;
  for (std::size_t big_d : {1000, 4000}) {
    const RFFMap map = sample_rff(dim, big_d, sigma, 23);
    double total = 0.0;
    for (std::size_t p = 0; p < pairs; ++p) {
      const auto fa = apply_rff_vector(map, as[p]);
      const auto fb = apply_rff_vector(map, bs[p]);
      double dot = 0.0;
      for (std::size_t j = 0; j < big_d; ++j) dot += fa[j] * fb[j];
      total += std::abs(dot - kernel_exact(as[p], bs[p], sigma));
    }
    const double mean_err = total / static_cast<double>(pairs);
    const double bound = 4.0 / std::sqrt(static_cast<double>(big_d));
    c.expect(mean_err <= bound, "D=" + std::to_string(big_d) + " error " +
                                    fmt(mean_err) + " > " + fmt(bound));
    errors.push_back(mean_err);
  }
  c.expect(errors[1] <= 0.7 * errors[0],
           "error at D=4000 (" + fmt(errors[1]) +
               ") not below 0.7x error at D=1000 (" + fmt(errors[0]) + ")");
}

/* 5. The federated run over mapped features equals the centralized solve
      with the same map. */
void criterion_rff_equivalence(Checker& c) {
  const FeatureDataset ds = gen_gaussian_mixture(8, 16, 200, 4.0, 1.0, 11);
  RFFConfig rff;
  rff.output_dim = 512;
  rff.sigma = 8.0;
  rff.seed = 4242;

  const RFFMap map = sample_rff(ds.dim(), rff.output_dim, rff.sigma, *rff.seed);
  const Matrix mapped = apply_rff(map, ds.features);
  const Classifier central = centralized_rr(mapped, ds.labels, ds.classes, 0.01);

  for (std::uint64_t pseed = 1; pseed <= 3; ++pseed) {
    const PartitionManifest m = partition_dirichlet(ds, 20, 0.5, pseed);
    FederationConfig cfg = fed_config(5, 100 + pseed);
    cfg.rff = rff;
    const FedRunResult res = run_fed3r(ds, m, cfg);
    const double diff =
        rel_frobenius_diff(res.classifier.weights, central.weights);
    c.expect(diff <= 1e-6,
             "partition " + std::to_string(pseed) + " diff " + fmt(diff));
  }
}

/* 6. Rounds-to-coverage statistics fall inside the reference bands. */
void criterion_coupon(Checker& c) {
  const CoverageResult small = coupon_rounds(100, 10, {0.5, 1.0}, 1000, 29);
  c.expect(small.mean_rounds[0] >= 6.0 && small.mean_rounds[0] <= 8.0,
           "K=100 50% mean " + fmt(small.mean_rounds[0]));
  c.expect(small.mean_rounds[1] >= 38.0 && small.mean_rounds[1] <= 62.0,
           "K=100 100% mean " + fmt(small.mean_rounds[1]));

  const CoverageResult large = coupon_rounds(1262, 10, {1.0}, 1000, 31);
  c.expect(large.mean_rounds[0] >= 815.0 && large.mean_rounds[0] <= 1125.0,
           "K=1262 100% mean " + fmt(large.mean_rounds[0]));
}

/* 7. Transfer and compute formulas, pinned numerically. */
void criterion_cost_formulas(Checker& c) {
  CostParams p;
  p.feature_dim = 1280;
  p.classes = 2028;
  p.local_epochs = 5;

  const CommValues stats_up = comm_per_client(Algorithm::fed3r, p);
  c.expect(stats_up.up_bytes() == 16936960,
           "statistics upload bytes " + std::to_string(stats_up.up_bytes()));
  c.expect(stats_up.down_values == 0, "statistics path has downstream cost");

  const CommValues lp = comm_per_client(Algorithm::fedavg_lp, p);
  c.expect(lp.up_values == 2595840 && lp.down_values == 2595840,
           "classifier transfer values " + std::to_string(lp.up_values));

  const double full =
      compute_per_round_per_client(Algorithm::fedavg_full, p, 120);
  c.expect(full == 6.039e11, "full-model FLOPs " + fmt(full));

  Rng rng(37);
  for (int i = 0; i < 10; ++i) {
    const double t_flops = rng.next_double() * 1e12;
    const std::uint64_t t = rng.below(3000);
    const std::size_t kappa = 1 + rng.below(64);
    const std::size_t clients = kappa + rng.below(5000);
    const double got =
        expected_cumulative_per_client(t_flops, t, kappa, clients);
    const double want = t_flops * static_cast<double>(t) *
                        static_cast<double>(kappa) /
                        static_cast<double>(clients);
    c.expect(got == want, "cumulative identity draw " + std::to_string(i));
  }
}

/* 8. Cross-entropy gradients agree with central finite differences. */
void criterion_gradient(Checker& c) {
  Rng rng(41);
  for (int problem = 0; problem < 20; ++problem) {
    const std::size_t q = 2 + rng.below(7);   // <= 8
    const std::size_t cc = 2 + rng.below(4);  // <= 5
    const std::size_t n = 3 + rng.below(6);
    Matrix w(q, cc), z(n, q);
    for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = rng.normal();
    for (std::size_t i = 0; i < z.size(); ++i) z.data()[i] = rng.normal();
    std::vector<std::uint32_t> labels(n);
    for (auto& y : labels) y = static_cast<std::uint32_t>(rng.below(cc));

    for (double tau : {0.1, 1.0, 10.0}) {
      const Matrix analytic = ce_loss_and_grad(w, tau, z, labels).second;
      Matrix numeric(q, cc);
      const double eps = 1e-5;
      for (std::size_t i = 0; i < w.size(); ++i) {
        Matrix plus = w, minus = w;
        plus.data()[i] += eps;
        minus.data()[i] -= eps;
        numeric.data()[i] = (ce_loss_and_grad(plus, tau, z, labels).first -
                             ce_loss_and_grad(minus, tau, z, labels).first) /
                            (2.0 * eps);
      }
      const double err = rel_frobenius_diff(analytic, numeric);
      c.expect(err <= 1e-4, "problem " + std::to_string(problem) + " tau " +
                                fmt(tau) + " err " + fmt(err));
    }
  }
}

/* 9. On anisotropic classes the solved classifier beats class means. */
void criterion_vs_class_means(Checker& c) {
  std::vector<double> rr_accs, ncm_accs;
  std::size_t strict_wins = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(derive_seed(seed, "aniso-bench"));
    const std::size_t dim = 16, classes = 10, per_class = 25;
    FeatureDataset ds;
    ds.classes = classes;
    ds.features = Matrix(classes * per_class, dim);
    ds.labels.resize(classes * per_class);

    // Condition number 50: high variance on the first half of the axes,
    // class means confined to the low-variance half.
    Matrix means(classes, dim);
    for (std::size_t cls = 0; cls < classes; ++cls) {
      double norm2 = 0.0;
      for (std::size_t j = dim / 2; j < dim; ++j) {
        means(cls, j) = rng.normal();
        norm2 += means(cls, j) * means(cls, j);
      }
      for (std::size_t j = dim / 2; j < dim; ++j) {
        means(cls, j) *= 3.0 / std::sqrt(norm2);
      }
    }
    std::size_t row = 0;
    for (std::size_t cls = 0; cls < classes; ++cls) {
      for (std::size_t s = 0; s < per_class; ++s, ++row) {
        for (std::size_t j = 0; j < dim; ++j) {
          const double sd = j < dim / 2 ? std::sqrt(50.0) : 1.0;
          ds.features(row, j) = means(cls, j) + sd * rng.normal();
        }
        ds.labels[row] = static_cast<std::uint32_t>(cls);
      }
    }

    const PartitionManifest m = partition_dirichlet(ds, 10, 1.0, seed);
    const FedRunResult rr = run_fed3r(ds, m, fed_config(5, seed));
    const double acc_rr = *rr.trace.rounds.back().accuracy;
    const double acc_ncm = evaluate_accuracy(fedncm_fit(ds, m), ds);
    rr_accs.push_back(acc_rr);
    ncm_accs.push_back(acc_ncm);
    if (acc_rr > acc_ncm) ++strict_wins;
  }
  c.expect(median(rr_accs) >= median(ncm_accs),
           "median " + fmt(median(rr_accs)) + " vs " + fmt(median(ncm_accs)));
  c.expect(strict_wins >= 8,
           "strictly better in only " + std::to_string(strict_wins) + "/10");
}

std::size_t rounds_to_fraction_of_final(const TrainingTrace& trace,
                                        double fraction) {
  double final_acc = 0.0;
  for (const auto& rec : trace.rounds) {
    if (rec.accuracy) final_acc = *rec.accuracy;
  }
  const double threshold = fraction * final_acc;
  for (const auto& rec : trace.rounds) {
    if (rec.accuracy && *rec.accuracy >= threshold) return rec.round;
  }
  return trace.rounds.size() + 1;
}

/* 10. Starting fine-tuning from the solved classifier reaches 90% of its
       final accuracy at least as fast as a random start, in >= 8/10 pairs. */
void criterion_ft_advantage(Checker& c) {
  std::size_t wins = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const FeatureDataset ds =
        gen_gaussian_mixture(8, 16, 50, 3.0, 1.0, 500 + seed);
    const PartitionManifest m = partition_dirichlet(ds, 16, 0.1, seed);

    FederationConfig fed = fed_config(4, 900 + seed, 1);

    LPConfig random_lp;
    random_lp.lr = 0.1;
    random_lp.rounds = 40;
    const LPRunResult random_run = run_lp(ds, m, random_lp, fed);

    const FedRunResult solved = run_fed3r(ds, m, fed_config(4, 900 + seed));
    const double tau = calibrate_temperature(
        solved.classifier, ds, {0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0});
    LPConfig warm_lp = random_lp;
    warm_lp.init = LPInit::fed3r;
    warm_lp.temperature = tau;
    const LPRunResult warm_run =
        run_lp(ds, m, warm_lp, fed, &solved.classifier);

    const std::size_t warm_rounds =
        rounds_to_fraction_of_final(warm_run.trace, 0.9);
    const std::size_t cold_rounds =
        rounds_to_fraction_of_final(random_run.trace, 0.9);
    if (warm_rounds <= cold_rounds) ++wins;
  }
  c.expect(wins >= 8,
           "warm start faster in only " + std::to_string(wins) + "/10");
}

/* 11. Gradient probing degrades under single-class clients; the closed-form
       solution does not. */
void criterion_classifier_bias(Checker& c) {
  std::vector<double> single_accs, iid_accs;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const FeatureDataset ds =
        gen_gaussian_mixture(10, 16, 40, 3.0, 1.0, 700 + seed);
    const PartitionManifest single = partition_single_class(ds, seed);
    const PartitionManifest iid = partition_dirichlet(ds, 10, 100.0, seed);

    LPConfig lp;
    lp.lr = 0.1;
    lp.rounds = 10;
    FederationConfig fed = fed_config(5, 800 + seed, 0);
    single_accs.push_back(
        *run_lp(ds, single, lp, fed).trace.rounds.back().accuracy);
    iid_accs.push_back(*run_lp(ds, iid, lp, fed).trace.rounds.back().accuracy);

    // The closed-form path is indifferent to the same two partitions.
    const FedRunResult w_single = run_fed3r(ds, single, fed_config(5, 1));
    const FedRunResult w_iid = run_fed3r(ds, iid, fed_config(5, 1));
    c.expect(rel_frobenius_diff(w_single.classifier.weights,
                                w_iid.classifier.weights) <= 1e-6,
             "solved weights differ across partitions at seed " +
                 std::to_string(seed));
  }
  c.expect(median(single_accs) < median(iid_accs),
           "probing medians: single-class " + fmt(median(single_accs)) +
               " vs near-IID " + fmt(median(iid_accs)));
}

/* 12. Rerunning the CLI with one config yields byte-identical metrics. */
void criterion_determinism(Checker& c) {
  const char* cli_env = std::getenv("FED3R_CLI");
  std::string cli = cli_env ? cli_env : "build/tools/fed3r";
  if (!std::filesystem::exists(cli)) {
    c.expect(false, "CLI binary not found (set FED3R_CLI): " + cli);
    return;
  }

  const auto dir = std::filesystem::temp_directory_path() /
                   ("fed3r_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const std::string cfg_path = (dir / "cfg.json").string();
  const std::string out_dir = (dir / "out").string();
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({
      "algorithm": "fed3r_rf",
      "seed": 20240131,
      "out_dir": ")" << out_dir << R"(",
      "synthetic": {"classes": 6, "dim": 12, "per_class": 50, "separation": 4.0, "anisotropy": 2.0},
      "partition": {"scheme": "dirichlet", "clients": 15, "alpha": 0.3},
      "federation": {"clients_per_round": 4, "eval_every": 1},
      "rff": {"output_dim": 64, "sigma": 6.0}
    })";
  }

  const std::string cmd = cli + " run -c " + cfg_path + " > /dev/null 2>&1";
  auto read_metrics = [&]() -> std::string {
    std::ifstream in(out_dir + "/metrics.csv", std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  };

  c.expect(std::system(cmd.c_str()) == 0, "first CLI run failed");
  const std::string first = read_metrics();
  c.expect(!first.empty(), "first run produced no metrics");
  c.expect(std::system(cmd.c_str()) == 0, "second CLI run failed");
  const std::string second = read_metrics();
  c.expect(first == second, "metrics.csv differs between identical runs");

  std::error_code ec;
  std::filesystem::remove_all(dir, ec);
}

struct Criterion {
  int id;
  const char* name;
  void (*run)(Checker&);
  double time_limit_s;  // 0 = no stated limit
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "federated solution equals centralized solve (15 runs)",
       criterion_equivalence, 10.0},
      {2, "solution invariant across heterogeneity regimes",
       criterion_heterogeneity, 30.0},
      {3, "exact ceil(K/kappa) round count on the full grid",
       criterion_round_count, 0.0},
      {4, "random-feature kernel fidelity at D=1000 and D=4000",
       criterion_rff_fidelity, 5.0},
      {5, "random-feature federated run equals centralized mapped solve",
       criterion_rff_equivalence, 0.0},
      {6, "coverage simulation matches reference bands", criterion_coupon,
       60.0},
      {7, "communication and compute formulas pinned", criterion_cost_formulas,
       0.0},
      {8, "cross-entropy gradients match finite differences",
       criterion_gradient, 0.0},
      {9, "solved classifier beats class means on anisotropic data",
       criterion_vs_class_means, 0.0},
      {10, "warm-started probing converges no slower than cold start",
       criterion_ft_advantage, 0.0},
      {11, "single-class probing degrades; closed form does not",
       criterion_classifier_bias, 0.0},
      {12, "identical configs give byte-identical metrics",
       criterion_determinism, 0.0},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Checker checker;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(checker);
    } catch (const std::exception& e) {
      checker.expect(false, std::string("exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (criterion.time_limit_s > 0.0 && elapsed > criterion.time_limit_s) {
      checker.expect(false, "runtime " + fmt(elapsed) + "s over the " +
                                fmt(criterion.time_limit_s) + "s budget");
    }
    std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n",
                checker.ok ? "PASS" : "FAIL", criterion.id, criterion.name,
                elapsed, checker.detail.empty() ? "" : " -- ",
                checker.detail.c_str());
    if (!checker.ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}

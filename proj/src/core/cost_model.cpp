#include "cost_model.hpp"

#include "error.hpp"

namespace fed3r {

namespace {

constexpr double kMega = 1e6;

std::uint64_t classifier_values(const CostParams& p) {
  return static_cast<std::uint64_t>(p.feature_dim) * p.classes;
}

void require_rff_dim(const CostParams& p) {
  require(p.rff_dim > 0, Errc::invalid_argument,
          "cost: rff_dim must be set for the random-feature variant");
}

}  // namespace

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "fed3r") return Algorithm::fed3r;
  if (name == "fed3r_rf") return Algorithm::fed3r_rf;
  if (name == "fedavg_lp") return Algorithm::fedavg_lp;
  if (name == "fedavgm_lp") return Algorithm::fedavgm_lp;
  if (name == "fedavg_full") return Algorithm::fedavg_full;
  if (name == "fedavgm_full") return Algorithm::fedavgm_full;
  fail(Errc::unknown_algorithm, "unknown algorithm: " + name);
}

const char* algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::fed3r: return "fed3r";
    case Algorithm::fed3r_rf: return "fed3r_rf";
    case Algorithm::fedavg_lp: return "fedavg_lp";
    case Algorithm::fedavgm_lp: return "fedavgm_lp";
    case Algorithm::fedavg_full: return "fedavg_full";
    case Algorithm::fedavgm_full: return "fedavgm_full";
  }
  fail(Errc::unknown_algorithm, "unknown algorithm enum value");
}

CommValues comm_per_client(Algorithm alg, const CostParams& p) {
  switch (alg) {
    case Algorithm::fed3r: {
      const std::uint64_t d = p.feature_dim;
      return {0, d * d + d * p.classes};
    }
    case Algorithm::fed3r_rf: {
      require_rff_dim(p);
      const std::uint64_t dd = p.rff_dim;
      return {0, dd * dd + dd * p.classes};
    }
    case Algorithm::fedavg_lp:
    case Algorithm::fedavgm_lp: {
      const std::uint64_t c = classifier_values(p);
      return {c, c};
    }
    case Algorithm::fedavg_full:
    case Algorithm::fedavgm_full: {
      const std::uint64_t m = p.backbone_params + classifier_values(p);
      return {m, m};
    }
  }
  fail(Errc::unknown_algorithm, "unknown algorithm enum value");
}

std::uint64_t bootstrap_down_values(const CostParams& p) {
  return p.backbone_params * static_cast<std::uint64_t>(p.clients);
}

double compute_per_round_per_client(Algorithm alg, const CostParams& p,
                                    std::uint64_t n_k) {
  const double samples = static_cast<double>(n_k);
  const double extractor = p.extractor_fwd_mflops * kMega;
  switch (alg) {
    case Algorithm::fed3r: {
      const double d = static_cast<double>(p.feature_dim);
      const double stats = 0.5 * d * (d + 1.0) + d * static_cast<double>(p.classes);
      return samples * (extractor + stats);
    }
    case Algorithm::fed3r_rf: {
      require_rff_dim(p);
      const double dd = static_cast<double>(p.rff_dim);
      const double stats = 0.5 * dd * (dd + 1.0) + dd * static_cast<double>(p.classes);
      const double projection =
          static_cast<double>(p.feature_dim) * dd;  // d-to-D map, per sample
      return samples * (extractor + stats + projection);
    }
    case Algorithm::fedavg_lp:
    case Algorithm::fedavgm_lp: {
      // Full forward, backward only through the head (backward ~ 2x forward).
      const double epochs = static_cast<double>(p.local_epochs);
      return epochs * samples *
             ((p.extractor_fwd_mflops + 3.0 * p.head_fwd_mflops) * kMega);
    }
    case Algorithm::fedavg_full:
    case Algorithm::fedavgm_full: {
      const double epochs = static_cast<double>(p.local_epochs);
      return 3.0 * epochs * samples * (p.model_fwd_mflops * kMega);
    }
  }
  fail(Errc::unknown_algorithm, "unknown algorithm enum value");
}

double expected_cumulative_per_client(double flops_per_round, std::uint64_t t,
                                      std::size_t clients_per_round,
                                      std::size_t clients) {
  require(clients > 0, Errc::invalid_argument, "cost: clients must be > 0");
  return flops_per_round * static_cast<double>(t) *
         static_cast<double>(clients_per_round) / static_cast<double>(clients);
}

}  // namespace fed3r

#ifndef FED3R_CORE_COST_MODEL_HPP
#define FED3R_CORE_COST_MODEL_HPP

#include <cstdint>
#include <string>

namespace fed3r {

enum class Algorithm {
  fed3r,
  fed3r_rf,
  fedavg_lp,
  fedavgm_lp,
  fedavg_full,
  fedavgm_full,
};

Algorithm algorithm_from_string(const std::string& name);
const char* algorithm_name(Algorithm alg);

// Inputs to the communication/computation calculators. The forward-pass
// constants default to a MobileNetV2-shaped extractor; the simulator never
// runs one, it only accounts for it so cost axes stay comparable to real
// deployments. All transferred values are counted as FP32 (4 bytes).
struct CostParams {
  std::size_t feature_dim = 0;    // d
  std::size_t classes = 0;        // C
  std::size_t rff_dim = 0;        // D; 0 when no random-feature map
  std::size_t local_epochs = 5;   // E
  std::size_t clients_per_round = 10;
  std::size_t clients = 0;        // K
  double extractor_fwd_mflops = 332.9;
  double head_fwd_mflops = 2.6;
  double model_fwd_mflops = 335.5;
  std::uint64_t backbone_params = 2223872;
};

constexpr std::uint64_t kBytesPerValue = 4;

struct CommValues {
  std::uint64_t down_values = 0;
  std::uint64_t up_values = 0;

  std::uint64_t down_bytes() const { return kBytesPerValue * down_values; }
  std::uint64_t up_bytes() const { return kBytesPerValue * up_values; }
};

// Per-round per-client transfer volume. Statistics-upload algorithms have
// zero downstream; gradient algorithms move the classifier (or full model)
// both ways every round.
CommValues comm_per_client(Algorithm alg, const CostParams& p);

// One-time cost of shipping the feature extractor to every client. Reported
// separately and excluded from ledgers by default: clients are assumed to
// already hold the extractor.
std::uint64_t bootstrap_down_values(const CostParams& p);

// Per-round FLOPs on one client holding n_k samples. The statistics path
// pays one extractor forward plus the Gram/class-sum accumulation (the Gram
// matrix is symmetric, hence the halved quadratic term); the variant with a
// random-feature map additionally pays the d-to-D projection, counted as an
// explicit n_k*d*D term.
double compute_per_round_per_client(Algorithm alg, const CostParams& p,
                                    std::uint64_t n_k);

// Cumulative expected per-client cost after t rounds when kappa of K clients
// are drawn per round: flops_per_round * t * kappa / K.
double expected_cumulative_per_client(double flops_per_round, std::uint64_t t,
                                      std::size_t clients_per_round,
                                      std::size_t clients);

// Running totals accrued while a federated run executes. Cumulative series
// are non-decreasing; per-round snapshots live in the trace records.
struct CostLedger {
  std::uint64_t down_bytes = 0;
  std::uint64_t up_bytes = 0;
  double client_flops_total = 0.0;

  double avg_client_flops(std::size_t clients) const {
    return clients == 0 ? 0.0
                        : client_flops_total / static_cast<double>(clients);
  }
};

}  // namespace fed3r

#endif

#ifndef FED3R_CORE_FEDERATION_HPP
#define FED3R_CORE_FEDERATION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "cost_model.hpp"
#include "dataset.hpp"
#include "random_features.hpp"
#include "ridge.hpp"
#include "rng.hpp"

namespace fed3r {

enum class SamplingMode {
  without_replacement,  // each client sampled exactly once; exact convergence
  with_replacement,     // fresh distinct batch each round; clients may recur
};

struct RFFConfig {
  std::size_t output_dim = 0;
  double sigma = 1000.0;
  // Shared public randomness: when unset the map seed derives from the run
  // seed, so every client can rebuild the same map locally.
  std::optional<std::uint64_t> seed;
};

struct FederationConfig {
  std::size_t clients = 0;           // K; 0 takes the manifest's client count
  std::size_t clients_per_round = 10;
  SamplingMode sampling = SamplingMode::without_replacement;
  std::size_t rounds_max = 0;        // with-replacement cap; 0 = until coverage
  double ridge_lambda = 0.01;
  std::optional<RFFConfig> rff;
  std::uint64_t seed = 0;
  std::size_t eval_every = 1;        // 0 = evaluate at termination only
  std::size_t threads = 0;           // 0 = hardware concurrency
  CostParams cost;                   // forward-cost constants; dims filled in
  // Charge the optional one-time shipping of the frequency matrix
  // (4*d*D bytes downstream per client at first participation) instead of
  // rebuilding it from the shared seed.
  bool charge_rff_transfer = false;
};

struct RoundRecord {
  std::size_t round = 0;                // 1-based, strictly increasing
  std::vector<std::uint32_t> sampled;   // ids drawn this round, ascending
  std::size_t new_clients = 0;          // first-time participants this round
  std::size_t distinct_clients_cum = 0;
  std::optional<double> accuracy;       // present at evaluation rounds
  std::uint64_t down_bytes_cum = 0;
  std::uint64_t up_bytes_cum = 0;
  double avg_client_flops_cum = 0.0;
};

struct TrainingTrace {
  std::vector<RoundRecord> rounds;
};

// Round-based client sampler over ids [0, clients).
class ClientSampler {
 public:
  ClientSampler(std::size_t clients, SamplingMode mode, Rng rng);

  // Draws the next round's batch (ascending ids). Without replacement the
  // final batch may be smaller; drawing past exhaustion throws
  // Errc::pool_exhausted.
  std::vector<std::uint32_t> next_round(std::size_t clients_per_round);

  bool exhausted() const;

 private:
  std::size_t clients_;
  SamplingMode mode_;
  Rng rng_;
  std::vector<std::uint32_t> pool_;
  std::size_t cursor_ = 0;
};

struct FedRunResult {
  Classifier classifier;
  RRStatistics statistics;
  TrainingTrace trace;
  std::optional<RFFMap> rff_map;
};

// Runs the full statistics-collection protocol over the given partition.
// Each sampled client computes its local statistics (after the
// random-feature map when configured) exactly once; the server folds merges
// in ascending client-id order, re-solving and normalizing at evaluation
// rounds and at termination. Without replacement the run finishes in exactly
// ceil(K / clients_per_round) rounds with every client absorbed; with
// replacement duplicates are ignored by the server (their uploads still
// accrue communication cost) and the run stops at full coverage or
// rounds_max. Accuracy is measured on eval_ds when given, else on ds.
FedRunResult run_fed3r(const FeatureDataset& ds,
                       const PartitionManifest& manifest,
                       const FederationConfig& cfg,
                       const FeatureDataset* eval_ds = nullptr);

}  // namespace fed3r

#endif

#include "sampling_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace fed3r {

CoverageResult coupon_rounds(std::size_t clients, std::size_t clients_per_round,
                             std::vector<double> fractions, std::size_t trials,
                             std::uint64_t seed, std::size_t threads) {
  require(clients >= 1, Errc::invalid_argument, "coupon: clients must be >= 1");
  require(clients_per_round >= 1 && clients_per_round <= clients,
          Errc::invalid_argument,
          "coupon: clients_per_round must be in [1, clients]");
  require(trials >= 1, Errc::invalid_argument, "coupon: trials must be >= 1");
  require(!fractions.empty(), Errc::invalid_argument,
          "coupon: need at least one coverage fraction");
  std::sort(fractions.begin(), fractions.end());
  for (double f : fractions) {
    require(f > 0.0 && f <= 1.0, Errc::invalid_argument,
            "coupon: fractions must lie in (0, 1]");
  }

  std::vector<std::size_t> thresholds(fractions.size());
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    thresholds[i] = static_cast<std::size_t>(
        std::ceil(fractions[i] * static_cast<double>(clients)));
    thresholds[i] = std::max<std::size_t>(1, std::min(thresholds[i], clients));
  }

  // rounds_at[t][i]: first round of trial t reaching threshold i.
  std::vector<std::vector<std::uint64_t>> rounds_at(
      trials, std::vector<std::uint64_t>(fractions.size(), 0));

  parallel_for(trials, threads, [&](std::size_t trial) {
    Rng rng(derive_seed(seed, "coupon/trial/" + std::to_string(trial)));
    std::vector<std::uint32_t> pool(clients);
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<bool> seen(clients, false);
    std::size_t covered = 0;
    std::size_t next_threshold = 0;
    std::uint64_t round = 0;
    while (next_threshold < thresholds.size()) {
      ++round;
      for (std::uint32_t id : rng.sample_distinct(pool, clients_per_round)) {
        if (!seen[id]) {
          seen[id] = true;
          ++covered;
        }
      }
      while (next_threshold < thresholds.size() &&
             covered >= thresholds[next_threshold]) {
        rounds_at[trial][next_threshold++] = round;
      }
    }
  });

  CoverageResult result;
  result.clients = clients;
  result.clients_per_round = clients_per_round;
  result.fractions = fractions;
  result.trials = trials;
  result.seed = seed;
  result.mean_rounds.resize(fractions.size());
  result.std_rounds.resize(fractions.size());
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    double mean = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      mean += static_cast<double>(rounds_at[t][i]);
    }
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const double d = static_cast<double>(rounds_at[t][i]) - mean;
      var += d * d;
    }
    var = trials > 1 ? var / static_cast<double>(trials - 1) : 0.0;
    result.mean_rounds[i] = mean;
    result.std_rounds[i] = std::sqrt(var);
  }
  return result;
}

}  // namespace fed3r

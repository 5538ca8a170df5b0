#ifndef FED3R_CORE_SAMPLING_SIM_HPP
#define FED3R_CORE_SAMPLING_SIM_HPP

#include <cstdint>
#include <vector>

namespace fed3r {

// Batch coupon-collector statistics: with kappa distinct clients drawn per
// round (rounds independent), how many rounds until a given fraction of the
// K clients has been seen at least once.
struct CoverageResult {
  std::size_t clients = 0;           // K
  std::size_t clients_per_round = 0; // kappa
  std::vector<double> fractions;
  std::vector<double> mean_rounds;   // one per fraction
  std::vector<double> std_rounds;    // sample std over trials
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

// Monte Carlo estimate over `trials` independent simulations. Trials use
// per-trial derived seeds, so parallel execution is schedule-independent.
CoverageResult coupon_rounds(std::size_t clients, std::size_t clients_per_round,
                             std::vector<double> fractions, std::size_t trials,
                             std::uint64_t seed, std::size_t threads = 0);

}  // namespace fed3r

#endif

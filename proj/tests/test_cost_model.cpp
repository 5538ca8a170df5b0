#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/cost_model.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

using namespace fed3r;

namespace {

CostParams landmarks_shape() {
  CostParams p;
  p.feature_dim = 1280;
  p.classes = 2028;
  p.local_epochs = 5;
  return p;
}

}  // namespace

TEST_CASE("statistics upload volume for the landmarks shape") {
  const CommValues v = comm_per_client(Algorithm::fed3r, landmarks_shape());
  CHECK(v.down_values == 0);  // no downstream, ever
  CHECK(v.up_values == 4234240);  // d^2 + dC
  CHECK(v.up_bytes() == 16936960);
  CHECK(v.down_bytes() == 0);
}

TEST_CASE("classifier transfer volume for linear probing") {
  const CommValues v = comm_per_client(Algorithm::fedavg_lp, landmarks_shape());
  CHECK(v.down_values == 2595840);  // dC
  CHECK(v.up_values == 2595840);
  const CommValues vm =
      comm_per_client(Algorithm::fedavgm_lp, landmarks_shape());
  CHECK(vm.up_values == v.up_values);
}

TEST_CASE("full-model transfer includes the backbone") {
  CostParams p = landmarks_shape();
  const CommValues v = comm_per_client(Algorithm::fedavg_full, p);
  CHECK(v.down_values == p.backbone_params + 2595840);
  CHECK(v.up_values == v.down_values);
}

TEST_CASE("random-feature upload uses the lifted dimension") {
  CostParams p = landmarks_shape();
  p.rff_dim = 512;
  const CommValues v = comm_per_client(Algorithm::fed3r_rf, p);
  CHECK(v.down_values == 0);
  CHECK(v.up_values == 512ull * 512ull + 512ull * 2028ull);

  CostParams missing = landmarks_shape();
  CHECK_THROWS_AS(comm_per_client(Algorithm::fed3r_rf, missing), Error);
}

TEST_CASE("bootstrap distribution cost is reported separately") {
  CostParams p = landmarks_shape();
  p.clients = 1262;
  CHECK(bootstrap_down_values(p) == p.backbone_params * 1262ull);
  // Not part of any per-round figure.
  CHECK(comm_per_client(Algorithm::fed3r, p).down_values == 0);
}

TEST_CASE("full-model training FLOPs") {
  const CostParams p = landmarks_shape();
  const double flops = compute_per_round_per_client(Algorithm::fedavg_full, p, 120);
  CHECK(flops == 6.039e11);  // 3 * 5 * 120 * 335.5 MFLOPs, exactly
}

TEST_CASE("statistics-path FLOPs match the formula") {
  const CostParams p = landmarks_shape();
  const double flops = compute_per_round_per_client(Algorithm::fed3r, p, 120);
  const double expected =
      120.0 * (332.9 * 1e6 + 0.5 * 1280.0 * 1281.0 + 1280.0 * 2028.0);
  CHECK(flops == doctest::Approx(expected).epsilon(1e-12));
  CHECK(compute_per_round_per_client(Algorithm::fed3r, p, 0) == 0.0);
}

TEST_CASE("linear-probing FLOPs pay a full forward and a head backward") {
  const CostParams p = landmarks_shape();
  const double flops = compute_per_round_per_client(Algorithm::fedavg_lp, p, 13);
  const double expected = 5.0 * 13.0 * ((332.9 + 3.0 * 2.6) * 1e6);
  CHECK(flops == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("random-feature FLOPs add the projection term") {
  CostParams p = landmarks_shape();
  p.rff_dim = 512;
  const double flops = compute_per_round_per_client(Algorithm::fed3r_rf, p, 10);
  const double expected =
      10.0 * (332.9 * 1e6 + 0.5 * 512.0 * 513.0 + 512.0 * 2028.0 +
              1280.0 * 512.0);
  CHECK(flops == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("expected cumulative cost identity") {
  CHECK(expected_cumulative_per_client(123.0, 0, 10, 100) == 0.0);

  // Sampled every round when kappa = K.
  CHECK(expected_cumulative_per_client(7.5, 9, 64, 64) == 7.5 * 9.0);

  // One expected visit after K/kappa rounds.
  CHECK(expected_cumulative_per_client(1e9, 10, 10, 100) == 1e9);

  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    const double t_flops = rng.next_double() * 1e12;
    const std::uint64_t t = rng.below(5000);
    const std::size_t kappa = 1 + rng.below(50);
    const std::size_t clients = kappa + rng.below(2000);
    const double got =
        expected_cumulative_per_client(t_flops, t, kappa, clients);
    const double want = t_flops * static_cast<double>(t) *
                        static_cast<double>(kappa) /
                        static_cast<double>(clients);
    CHECK(got == want);  // same expression, bitwise
  }
}

TEST_CASE("algorithm names round trip") {
  for (Algorithm alg :
       {Algorithm::fed3r, Algorithm::fed3r_rf, Algorithm::fedavg_lp,
        Algorithm::fedavgm_lp, Algorithm::fedavg_full, Algorithm::fedavgm_full}) {
    CHECK(algorithm_from_string(algorithm_name(alg)) == alg);
  }
  try {
    algorithm_from_string("scaffold");
    FAIL("expected unknown_algorithm");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unknown_algorithm);
  }
}

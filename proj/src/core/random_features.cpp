#include "random_features.hpp"

#include <cmath>
#include <numbers>

#include "error.hpp"
#include "rng.hpp"

namespace fed3r {

namespace {

// One standard normal from the counter pair (2t, 2t+1) of the seeded stream.
double normal_at(std::uint64_t seed, std::uint64_t t) {
  const double u1 =
      static_cast<double>((splitmix64_at(seed, 2 * t) >> 11) + 1) * 0x1.0p-53;
  const double u2 = u64_to_unit_double(splitmix64_at(seed, 2 * t + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

RFFMap sample_rff(std::size_t input_dim, std::size_t output_dim, double sigma,
                  std::uint64_t seed) {
  require(sigma > 0.0, Errc::invalid_bandwidth,
          "sample_rff: sigma must be positive");
  require(input_dim >= 1 && output_dim >= 1, Errc::invalid_argument,
          "sample_rff: dimensions must be >= 1");

  RFFMap map;
  map.input_dim = input_dim;
  map.output_dim = output_dim;
  map.sigma = sigma;
  map.seed = seed;
  map.frequencies = Matrix(input_dim, output_dim);
  map.phases.resize(output_dim);

  const double inv_sigma = 1.0 / sigma;
  for (std::size_t i = 0; i < input_dim; ++i) {
    double* row = map.frequencies.row(i);
    for (std::size_t j = 0; j < output_dim; ++j) {
      row[j] = inv_sigma * normal_at(seed, i * output_dim + j);
    }
  }
  // Phases live past the frequency counters in the same stream.
  const std::uint64_t phase_base = 2 * input_dim * output_dim;
  for (std::size_t j = 0; j < output_dim; ++j) {
    map.phases[j] = 2.0 * std::numbers::pi *
                    u64_to_unit_double(splitmix64_at(seed, phase_base + j));
  }
  return map;
}

Matrix apply_rff(const RFFMap& map, const Matrix& z) {
  require(z.cols() == map.input_dim, Errc::dimension_mismatch,
          "apply_rff: input dimension must match map");
  Matrix out = matmul(z, map.frequencies);
  const double scale = std::sqrt(2.0 / static_cast<double>(map.output_dim));
  for (std::size_t i = 0; i < out.rows(); ++i) {
    double* row = out.row(i);
    for (std::size_t j = 0; j < map.output_dim; ++j) {
      row[j] = scale * std::cos(row[j] + map.phases[j]);
    }
  }
  return out;
}

std::vector<double> apply_rff_vector(const RFFMap& map,
                                     std::span<const double> z) {
  require(z.size() == map.input_dim, Errc::dimension_mismatch,
          "apply_rff: input dimension must match map");
  std::vector<double> out(map.output_dim, 0.0);
  for (std::size_t k = 0; k < map.input_dim; ++k) {
    const double zk = z[k];
    const double* fk = map.frequencies.row(k);
    for (std::size_t j = 0; j < map.output_dim; ++j) out[j] += zk * fk[j];
  }
  const double scale = std::sqrt(2.0 / static_cast<double>(map.output_dim));
  for (std::size_t j = 0; j < map.output_dim; ++j) {
    out[j] = scale * std::cos(out[j] + map.phases[j]);
  }
  return out;
}

double kernel_exact(std::span<const double> a, std::span<const double> b,
                    double sigma) {
  require(sigma > 0.0, Errc::invalid_bandwidth,
          "kernel_exact: sigma must be positive");
  require(a.size() == b.size(), Errc::dimension_mismatch,
          "kernel_exact: dimensions must match");
  double dist2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    dist2 += d * d;
  }
  return std::exp(-dist2 / (2.0 * sigma * sigma));
}

}  // namespace fed3r

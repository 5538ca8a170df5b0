#ifndef FED3R_CORE_RANDOM_FEATURES_HPP
#define FED3R_CORE_RANDOM_FEATURES_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "matrix.hpp"

namespace fed3r {

// Frozen random projection approximating the RBF kernel
// k(z, w) = exp(-||z - w||^2 / (2 sigma^2)). The map is a pure function of
// (input_dim, output_dim, sigma, seed): every element comes from a
// counter-based stream, so clients rebuild it locally instead of receiving
// the frequency matrix over the wire.
struct RFFMap {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  double sigma = 0.0;
  Matrix frequencies;          // input_dim x output_dim, N(0, 1/sigma^2)
  std::vector<double> phases;  // output_dim, U[0, 2*pi)
  std::uint64_t seed = 0;
};

RFFMap sample_rff(std::size_t input_dim, std::size_t output_dim, double sigma,
                  std::uint64_t seed);

// Row i, column j of the result is
//   sqrt(2/output_dim) * cos(z_i . freq_j + phase_j),
// the phase-shifted cosine estimator. Entries are bounded by
// sqrt(2/output_dim) in magnitude.
Matrix apply_rff(const RFFMap& map, const Matrix& z);

std::vector<double> apply_rff_vector(const RFFMap& map,
                                     std::span<const double> z);

// Exact RBF kernel; the testing oracle the random map converges to.
double kernel_exact(std::span<const double> a, std::span<const double> b,
                    double sigma);

}  // namespace fed3r

#endif

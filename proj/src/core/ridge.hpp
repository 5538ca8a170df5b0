#ifndef FED3R_CORE_RIDGE_HPP
#define FED3R_CORE_RIDGE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "matrix.hpp"

namespace fed3r {

// The mergeable summary a client ships instead of gradients: the Gram matrix
// of its mapped features and the per-class feature sums, plus the absorbed
// sample count. Merging is elementwise addition, a commutative monoid with
// the zero statistics as identity.
struct RRStatistics {
  std::size_t dim = 0;
  std::size_t classes = 0;
  Matrix gram_matrix;  // dim x dim, symmetric PSD
  Matrix class_sums;   // dim x classes; column c sums features with label c
  std::uint64_t count = 0;
};

RRStatistics zero_stats(std::size_t dim, std::size_t classes);

RRStatistics compute_local_stats(const Matrix& features,
                                 const std::vector<std::uint32_t>& labels,
                                 std::size_t classes);

RRStatistics merge_stats(const RRStatistics& a, const RRStatistics& b);

struct Classifier {
  Matrix weights;  // dim x classes
  double temperature = 1.0;
  bool normalized = false;

  std::size_t dim() const { return weights.rows(); }
  std::size_t classes() const { return weights.cols(); }
};

// Closed-form ridge solve on accumulated statistics:
// weights = (gram + lambda*I)^{-1} * class_sums, via Cholesky.
Classifier solve_classifier(const RRStatistics& stats, double ridge_lambda);

// Rescales every column to unit Euclidean norm; columns with norm <= 1e-12
// are left untouched and their indices reported through zero_columns (a
// warning, not an error — the class simply never appeared in the data).
Classifier normalize_columns(const Classifier& cls,
                             std::vector<std::size_t>* zero_columns = nullptr);

// argmax_c of W^T z; ties break toward the lowest class index.
std::size_t predict(const Classifier& cls, std::span<const double> features);

double evaluate_accuracy(const Classifier& cls, const FeatureDataset& ds);

// Whole-dataset reference path: local stats on everything, solve, normalize.
// The federated runs are checked against this.
Classifier centralized_rr(const Matrix& features,
                          const std::vector<std::uint32_t>& labels,
                          std::size_t classes, double ridge_lambda);

Matrix one_hot(const std::vector<std::uint32_t>& labels, std::size_t classes);

// Statistics file format (little-endian, bit-exact round trip):
//   magic "F3RS", version u32 = 1, dim u32, classes u32, count u64,
//   upper triangle of the Gram matrix row-major (dim*(dim+1)/2 f64),
//   class_sums row-major (dim*classes f64).
void write_stats(const std::string& path, const RRStatistics& stats);
RRStatistics read_stats(const std::string& path);

// Classifier checkpoint format (little-endian):
//   magic "F3RC", version u32 = 1, dim u32, classes u32, temperature f64,
//   normalized u8, weights row-major (dim*classes f64).
void write_classifier(const std::string& path, const Classifier& cls);
Classifier read_classifier(const std::string& path);

}  // namespace fed3r

#endif

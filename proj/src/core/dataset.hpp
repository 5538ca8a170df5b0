#ifndef FED3R_CORE_DATASET_HPP
#define FED3R_CORE_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace fed3r {

// Feature vectors with integer class labels in [0, classes). Stands in for
// the frozen-extractor embeddings a deployment would compute upstream.
struct FeatureDataset {
  Matrix features;                   // n x dim
  std::vector<std::uint32_t> labels; // n entries
  std::size_t classes = 0;

  std::size_t count() const { return features.rows(); }
  std::size_t dim() const { return features.cols(); }
};

// Throws on label range violations, row/label count mismatch, or non-finite
// feature entries.
void validate_dataset(const FeatureDataset& ds);

// Balanced Gaussian mixture. Class means are drawn on random directions of
// length `separation`; per-coordinate variances are geometrically spaced so
// the diagonal covariance has condition number `anisotropy`.
FeatureDataset gen_gaussian_mixture(std::size_t classes, std::size_t dim,
                                    std::size_t per_class, double separation,
                                    double anisotropy, std::uint64_t seed);

// Feature file format (little-endian, bit-exact):
//   magic "F3RD", version u32 = 1, n u64, dim u32, classes u32,
//   n*dim f32 row-major features, n u32 labels.
// Storage is 32-bit; reading promotes to 64-bit.
void write_features(const std::string& path, const FeatureDataset& ds);
FeatureDataset read_features(const std::string& path);

struct PartitionManifest {
  // assignment[k] lists the sorted global sample indices owned by client k.
  std::vector<std::vector<std::uint64_t>> assignment;
  std::string scheme;
  double alpha = 0.0;
  std::uint64_t seed = 0;

  std::size_t client_count() const { return assignment.size(); }
  std::size_t total_samples() const;
};

// Index lists must be disjoint, cover exactly {0..n-1}, and be nonempty per
// client. Throws Errc::invalid_manifest otherwise.
void validate_manifest(const PartitionManifest& m);

// Label-skew split: each client draws class proportions from
// Dirichlet(alpha * 1_C); class samples are apportioned to clients by largest
// remainder on those weights. A repair pass moves one sample from the largest
// client to any client that ends up empty.
PartitionManifest partition_dirichlet(const FeatureDataset& ds,
                                      std::size_t clients, double alpha,
                                      std::uint64_t seed);

// Most heterogeneous split: one (or clients_per_class) clients per class,
// every client holding samples of a single label.
PartitionManifest partition_single_class(const FeatureDataset& ds,
                                         std::uint64_t seed,
                                         std::size_t clients_per_class = 1);

// Manifest file: human-readable JSON with keys scheme, alpha, seed and a
// clients object mapping "0".."K-1" to index arrays. Disjointness and
// coverage are revalidated on read.
void write_manifest(const std::string& path, const PartitionManifest& m);
PartitionManifest read_manifest(const std::string& path);

// Rows of `m` selected by `idx`, in the given order.
Matrix gather_rows(const Matrix& m, const std::vector<std::uint64_t>& idx);
std::vector<std::uint32_t> gather_labels(const std::vector<std::uint32_t>& labels,
                                         const std::vector<std::uint64_t>& idx);

// Writes bytes to path via a temp file plus rename, so readers never observe
// a partial file.
void atomic_write_file(const std::string& path, const std::string& bytes);

}  // namespace fed3r

#endif

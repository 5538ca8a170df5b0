#include "ridge.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "error.hpp"

namespace fed3r {

namespace {

constexpr char kStatsMagic[4] = {'F', '3', 'R', 'S'};
constexpr char kClassifierMagic[4] = {'F', '3', 'R', 'C'};
constexpr std::uint32_t kStatsVersion = 1;
constexpr std::uint32_t kClassifierVersion = 1;
constexpr double kZeroColumnNorm = 1e-12;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

struct Cursor {
  const std::string& buf;
  const std::string& path;
  std::size_t pos = 0;

  void need(std::size_t n) {
    if (buf.size() - pos < n) {
      fail(Errc::truncated_file, path + ": file ends mid-record");
    }
  }
  void magic(const char expected[4]) {
    need(4);
    if (std::memcmp(buf.data() + pos, expected, 4) != 0) {
      fail(Errc::bad_magic, path + ": unrecognized file magic");
    }
    pos += 4;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(buf[pos++]);
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void done() {
    if (pos != buf.size()) fail(Errc::io_failure, path + ": trailing bytes");
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_failure, path + ": cannot open for reading");
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (in.bad()) fail(Errc::io_failure, path + ": read error");
  return buf;
}

}  // namespace

RRStatistics zero_stats(std::size_t dim, std::size_t classes) {
  RRStatistics s;
  s.dim = dim;
  s.classes = classes;
  s.gram_matrix = Matrix(dim, dim);
  s.class_sums = Matrix(dim, classes);
  s.count = 0;
  return s;
}

RRStatistics compute_local_stats(const Matrix& features,
                                 const std::vector<std::uint32_t>& labels,
                                 std::size_t classes) {
  require(labels.size() == features.rows(), Errc::dimension_mismatch,
          "local stats: label count must match feature rows");
  for (std::uint32_t y : labels) {
    require(y < classes, Errc::label_out_of_range,
            "local stats: label " + std::to_string(y) + " outside [0, " +
                std::to_string(classes) + ")");
  }
  RRStatistics s = zero_stats(features.cols(), classes);
  s.gram_matrix = gram(features);
  // Per-sample accumulation; identical to cross(features, one_hot(labels)).
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const double* zi = features.row(i);
    const std::uint32_t y = labels[i];
    for (std::size_t j = 0; j < features.cols(); ++j) {
      s.class_sums(j, y) += zi[j];
    }
  }
  s.count = labels.size();
  return s;
}

RRStatistics merge_stats(const RRStatistics& a, const RRStatistics& b) {
  require(a.dim == b.dim && a.classes == b.classes, Errc::dimension_mismatch,
          "merge: statistics shapes must match");
  RRStatistics out = a;
  for (std::size_t i = 0; i < out.gram_matrix.size(); ++i) {
    out.gram_matrix.data()[i] += b.gram_matrix.data()[i];
  }
  for (std::size_t i = 0; i < out.class_sums.size(); ++i) {
    out.class_sums.data()[i] += b.class_sums.data()[i];
  }
  out.count += b.count;
  return out;
}

Classifier solve_classifier(const RRStatistics& stats, double ridge_lambda) {
  require(ridge_lambda > 0.0, Errc::invalid_argument,
          "solve: ridge_lambda must be positive");
  Classifier cls;
  cls.weights = spd_solve(add_scaled_identity(stats.gram_matrix, ridge_lambda),
                          stats.class_sums);
  cls.temperature = 1.0;
  cls.normalized = false;
  return cls;
}

Classifier normalize_columns(const Classifier& cls,
                             std::vector<std::size_t>* zero_columns) {
  Classifier out = cls;
  if (zero_columns) zero_columns->clear();
  for (std::size_t c = 0; c < out.classes(); ++c) {
    double norm2 = 0.0;
    for (std::size_t j = 0; j < out.dim(); ++j) {
      norm2 += out.weights(j, c) * out.weights(j, c);
    }
    const double norm = std::sqrt(norm2);
    if (norm > kZeroColumnNorm) {
      for (std::size_t j = 0; j < out.dim(); ++j) out.weights(j, c) /= norm;
    } else if (zero_columns) {
      zero_columns->push_back(c);
    }
  }
  out.normalized = true;
  return out;
}

std::size_t predict(const Classifier& cls, std::span<const double> features) {
  require(features.size() == cls.dim(), Errc::dimension_mismatch,
          "predict: feature dimension must match classifier");
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < cls.classes(); ++c) {
    double score = 0.0;
    for (std::size_t j = 0; j < cls.dim(); ++j) {
      score += cls.weights(j, c) * features[j];
    }
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

double evaluate_accuracy(const Classifier& cls, const FeatureDataset& ds) {
  require(ds.count() > 0, Errc::empty_dataset,
          "evaluate: dataset must be nonempty");
  require(ds.dim() == cls.dim(), Errc::dimension_mismatch,
          "evaluate: feature dimension must match classifier");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ds.count(); ++i) {
    if (predict(cls, ds.features.row_span(i)) == ds.labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(ds.count());
}

Classifier centralized_rr(const Matrix& features,
                          const std::vector<std::uint32_t>& labels,
                          std::size_t classes, double ridge_lambda) {
  return normalize_columns(
      solve_classifier(compute_local_stats(features, labels, classes),
                       ridge_lambda));
}

Matrix one_hot(const std::vector<std::uint32_t>& labels, std::size_t classes) {
  Matrix y(labels.size(), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] < classes, Errc::label_out_of_range,
            "one_hot: label out of range");
    y(i, labels[i]) = 1.0;
  }
  return y;
}

void write_stats(const std::string& path, const RRStatistics& stats) {
  std::string buf;
  const std::size_t q = stats.dim;
  buf.reserve(24 + (q * (q + 1) / 2 + q * stats.classes) * 8);
  buf.append(kStatsMagic, 4);
  put_u32(buf, kStatsVersion);
  put_u32(buf, static_cast<std::uint32_t>(q));
  put_u32(buf, static_cast<std::uint32_t>(stats.classes));
  put_u64(buf, stats.count);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = i; j < q; ++j) put_f64(buf, stats.gram_matrix(i, j));
  }
  for (std::size_t i = 0; i < stats.class_sums.size(); ++i) {
    put_f64(buf, stats.class_sums.data()[i]);
  }
  atomic_write_file(path, buf);
}

RRStatistics read_stats(const std::string& path) {
  const std::string buf = slurp(path);
  Cursor r{buf, path};
  r.magic(kStatsMagic);
  const std::uint32_t version = r.u32();
  if (version != kStatsVersion) {
    fail(Errc::version_unsupported,
         path + ": statistics file version " + std::to_string(version));
  }
  const std::uint32_t q = r.u32();
  const std::uint32_t classes = r.u32();
  RRStatistics s = zero_stats(q, classes);
  s.count = r.u64();
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = i; j < q; ++j) {
      const double v = r.f64();
      s.gram_matrix(i, j) = v;
      s.gram_matrix(j, i) = v;
    }
  }
  for (std::size_t i = 0; i < s.class_sums.size(); ++i) {
    s.class_sums.data()[i] = r.f64();
  }
  r.done();
  require(all_finite(s.gram_matrix) && all_finite(s.class_sums),
          Errc::invalid_argument, path + ": non-finite statistics entries");
  return s;
}

void write_classifier(const std::string& path, const Classifier& cls) {
  std::string buf;
  buf.reserve(25 + cls.weights.size() * 8);
  buf.append(kClassifierMagic, 4);
  put_u32(buf, kClassifierVersion);
  put_u32(buf, static_cast<std::uint32_t>(cls.dim()));
  put_u32(buf, static_cast<std::uint32_t>(cls.classes()));
  put_f64(buf, cls.temperature);
  buf.push_back(cls.normalized ? 1 : 0);
  for (std::size_t i = 0; i < cls.weights.size(); ++i) {
    put_f64(buf, cls.weights.data()[i]);
  }
  atomic_write_file(path, buf);
}

Classifier read_classifier(const std::string& path) {
  const std::string buf = slurp(path);
  Cursor r{buf, path};
  r.magic(kClassifierMagic);
  const std::uint32_t version = r.u32();
  if (version != kClassifierVersion) {
    fail(Errc::version_unsupported,
         path + ": classifier file version " + std::to_string(version));
  }
  const std::uint32_t q = r.u32();
  const std::uint32_t classes = r.u32();
  Classifier cls;
  cls.temperature = r.f64();
  cls.normalized = r.u8() != 0;
  cls.weights = Matrix(q, classes);
  for (std::size_t i = 0; i < cls.weights.size(); ++i) {
    cls.weights.data()[i] = r.f64();
  }
  r.done();
  require(all_finite(cls.weights), Errc::invalid_argument,
          path + ": non-finite classifier weights");
  require(cls.temperature > 0.0, Errc::invalid_argument,
          path + ": temperature must be positive");
  return cls;
}

}  // namespace fed3r

#include "dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "rng.hpp"

namespace fed3r {

namespace {

constexpr char kFeatureMagic[4] = {'F', '3', 'R', 'D'};
constexpr std::uint32_t kFeatureVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::string& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

// Bounds-checked little-endian reader over an in-memory buffer.
class ByteReader {
 public:
  ByteReader(const std::string& buf, const std::string& path)
      : buf_(buf), path_(path) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }

  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

  void magic(const char expected[4]) {
    need(4);
    if (std::memcmp(buf_.data() + pos_, expected, 4) != 0) {
      fail(Errc::bad_magic, path_ + ": unrecognized file magic");
    }
    pos_ += 4;
  }

  std::size_t remaining() const { return buf_.size() - pos_; }

  void expect_consumed() const {
    if (pos_ != buf_.size()) {
      fail(Errc::io_failure, path_ + ": trailing bytes after payload");
    }
  }

 private:
  void need(std::size_t n) {
    if (buf_.size() - pos_ < n) {
      fail(Errc::truncated_file, path_ + ": file ends mid-record");
    }
  }

  const std::string& buf_;
  std::string path_;
  std::size_t pos_ = 0;
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

void atomic_write_file(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io_failure, tmp + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) fail(Errc::io_failure, tmp + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    fail(Errc::io_failure, path + ": rename failed: " + ec.message());
  }
}

void validate_dataset(const FeatureDataset& ds) {
  require(ds.labels.size() == ds.count(), Errc::dimension_mismatch,
          "dataset: label count must equal feature row count");
  require(ds.classes > 0 || ds.count() == 0, Errc::invalid_argument,
          "dataset: class count must be positive");
  for (std::uint32_t y : ds.labels) {
    require(y < ds.classes, Errc::label_out_of_range,
            "dataset: label " + std::to_string(y) + " outside [0, " +
                std::to_string(ds.classes) + ")");
  }
  require(all_finite(ds.features), Errc::invalid_argument,
          "dataset: features contain non-finite values");
}

FeatureDataset gen_gaussian_mixture(std::size_t classes, std::size_t dim,
                                    std::size_t per_class, double separation,
                                    double anisotropy, std::uint64_t seed) {
  require(classes >= 2, Errc::invalid_argument, "gen: classes must be >= 2");
  require(dim >= 2, Errc::invalid_argument, "gen: dim must be >= 2");
  require(per_class >= 1, Errc::invalid_argument, "gen: per_class must be >= 1");
  require(separation >= 0.0, Errc::invalid_argument, "gen: separation must be >= 0");
  require(anisotropy >= 1.0, Errc::invalid_argument, "gen: anisotropy must be >= 1");

  Rng rng(derive_seed(seed, "datagen"));

  std::vector<double> stddev(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const double t = dim > 1 ? static_cast<double>(j) / static_cast<double>(dim - 1) : 0.0;
    stddev[j] = std::sqrt(std::pow(anisotropy, t));
  }

  Matrix means(classes, dim);
  for (std::size_t c = 0; c < classes; ++c) {
    double norm2 = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double v = rng.normal();
      means(c, j) = v;
      norm2 += v * v;
    }
    const double scale = norm2 > 0.0 ? separation / std::sqrt(norm2) : 0.0;
    for (std::size_t j = 0; j < dim; ++j) means(c, j) *= scale;
  }

  FeatureDataset ds;
  ds.classes = classes;
  ds.features = Matrix(classes * per_class, dim);
  ds.labels.resize(classes * per_class);
  std::size_t row = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i, ++row) {
      double* r = ds.features.row(row);
      for (std::size_t j = 0; j < dim; ++j) {
        r[j] = means(c, j) + stddev[j] * rng.normal();
      }
      ds.labels[row] = static_cast<std::uint32_t>(c);
    }
  }
  return ds;
}

void write_features(const std::string& path, const FeatureDataset& ds) {
  validate_dataset(ds);
  std::string buf;
  buf.reserve(24 + ds.count() * (ds.dim() * 4 + 4));
  buf.append(kFeatureMagic, 4);
  put_u32(buf, kFeatureVersion);
  put_u64(buf, ds.count());
  put_u32(buf, static_cast<std::uint32_t>(ds.dim()));
  put_u32(buf, static_cast<std::uint32_t>(ds.classes));
  for (std::size_t i = 0; i < ds.count(); ++i) {
    const double* r = ds.features.row(i);
    for (std::size_t j = 0; j < ds.dim(); ++j) {
      put_f32(buf, static_cast<float>(r[j]));
    }
  }
  for (std::uint32_t y : ds.labels) put_u32(buf, y);
  atomic_write_file(path, buf);
}

FeatureDataset read_features(const std::string& path) {
  const std::string buf = slurp(path);
  ByteReader r(buf, path);
  r.magic(kFeatureMagic);
  const std::uint32_t version = r.u32();
  if (version != kFeatureVersion) {
    fail(Errc::version_unsupported,
         path + ": feature file version " + std::to_string(version));
  }
  const std::uint64_t n = r.u64();
  const std::uint32_t dim = r.u32();
  const std::uint32_t classes = r.u32();
  if (r.remaining() != n * (static_cast<std::uint64_t>(dim) * 4 + 4)) {
    if (r.remaining() < n * (static_cast<std::uint64_t>(dim) * 4 + 4)) {
      fail(Errc::truncated_file, path + ": payload shorter than header declares");
    }
    fail(Errc::io_failure, path + ": payload longer than header declares");
  }

  FeatureDataset ds;
  ds.classes = classes;
  ds.features = Matrix(n, dim);
  for (std::uint64_t i = 0; i < n; ++i) {
    double* row = ds.features.row(i);
    for (std::uint32_t j = 0; j < dim; ++j) {
      row[j] = static_cast<double>(r.f32());
    }
  }
  ds.labels.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) ds.labels[i] = r.u32();
  r.expect_consumed();
  validate_dataset(ds);
  return ds;
}

std::size_t PartitionManifest::total_samples() const {
  std::size_t n = 0;
  for (const auto& c : assignment) n += c.size();
  return n;
}

void validate_manifest(const PartitionManifest& m) {
  require(!m.assignment.empty(), Errc::invalid_manifest,
          "manifest: no clients");
  std::vector<std::uint64_t> all;
  all.reserve(m.total_samples());
  for (std::size_t k = 0; k < m.assignment.size(); ++k) {
    require(!m.assignment[k].empty(), Errc::invalid_manifest,
            "manifest: client " + std::to_string(k) + " is empty");
    require(std::is_sorted(m.assignment[k].begin(), m.assignment[k].end()),
            Errc::invalid_manifest,
            "manifest: client " + std::to_string(k) + " indices not sorted");
    all.insert(all.end(), m.assignment[k].begin(), m.assignment[k].end());
  }
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i] != i) {
      fail(Errc::invalid_manifest,
           all[i] < i ? "manifest: duplicate sample index " + std::to_string(all[i])
                      : "manifest: index gap at " + std::to_string(i));
    }
  }
}

PartitionManifest partition_dirichlet(const FeatureDataset& ds,
                                      std::size_t clients, double alpha,
                                      std::uint64_t seed) {
  require(alpha > 0.0, Errc::invalid_argument,
          "partition: alpha must be positive (alpha = 0 maps to the"
          " single-class scheme)");
  require(clients >= 1, Errc::invalid_argument, "partition: need >= 1 client");
  require(clients <= ds.count(), Errc::too_many_clients,
          "partition: more clients than samples");
  validate_dataset(ds);

  Rng rng(derive_seed(seed, "partition"));
  const std::size_t c_count = ds.classes;

  // Per-client class proportions.
  Matrix prop(clients, c_count);
  for (std::size_t k = 0; k < clients; ++k) {
    double sum = 0.0;
    for (std::size_t c = 0; c < c_count; ++c) {
      const double g = rng.gamma(alpha);
      prop(k, c) = g;
      sum += g;
    }
    if (sum <= 0.0) {
      // All gamma draws underflowed; fall back to a single random class.
      prop(k, rng.below(c_count)) = 1.0;
      sum = 1.0;
    }
    for (std::size_t c = 0; c < c_count; ++c) prop(k, c) /= sum;
  }

  std::vector<std::vector<std::uint64_t>> by_class(c_count);
  for (std::size_t i = 0; i < ds.count(); ++i) {
    by_class[ds.labels[i]].push_back(i);
  }

  PartitionManifest m;
  m.assignment.resize(clients);
  m.scheme = "dirichlet";
  m.alpha = alpha;
  m.seed = seed;

  std::vector<std::size_t> counts(clients);
  std::vector<std::pair<double, std::size_t>> remainders(clients);
  for (std::size_t c = 0; c < c_count; ++c) {
    auto& pool = by_class[c];
    if (pool.empty()) continue;
    rng.shuffle(pool);

    double total_w = 0.0;
    for (std::size_t k = 0; k < clients; ++k) total_w += prop(k, c);

    // Largest-remainder apportionment of this class across clients.
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < clients; ++k) {
      const double w = total_w > 0.0 ? prop(k, c) / total_w
                                     : 1.0 / static_cast<double>(clients);
      const double exact = w * static_cast<double>(pool.size());
      counts[k] = static_cast<std::size_t>(std::floor(exact));
      remainders[k] = {exact - std::floor(exact), k};
      assigned += counts[k];
    }
    std::sort(remainders.begin(), remainders.end(),
              [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
              });
    for (std::size_t r = 0; assigned < pool.size(); ++r, ++assigned) {
      ++counts[remainders[r % clients].second];
    }

    std::size_t cursor = 0;
    for (std::size_t k = 0; k < clients; ++k) {
      for (std::size_t i = 0; i < counts[k]; ++i) {
        m.assignment[k].push_back(pool[cursor++]);
      }
    }
  }

  // Repair: no client may end up empty.
  for (std::size_t k = 0; k < clients; ++k) {
    if (!m.assignment[k].empty()) continue;
    std::size_t donor = 0;
    for (std::size_t j = 1; j < clients; ++j) {
      if (m.assignment[j].size() > m.assignment[donor].size()) donor = j;
    }
    require(m.assignment[donor].size() > 1, Errc::internal,
            "partition: repair pass has no donor");
    m.assignment[k].push_back(m.assignment[donor].back());
    m.assignment[donor].pop_back();
  }

  for (auto& a : m.assignment) std::sort(a.begin(), a.end());
  validate_manifest(m);
  return m;
}

PartitionManifest partition_single_class(const FeatureDataset& ds,
                                         std::uint64_t seed,
                                         std::size_t clients_per_class) {
  require(clients_per_class >= 1, Errc::invalid_argument,
          "partition: clients_per_class must be >= 1");
  validate_dataset(ds);

  std::vector<std::vector<std::uint64_t>> by_class(ds.classes);
  for (std::size_t i = 0; i < ds.count(); ++i) {
    by_class[ds.labels[i]].push_back(i);
  }
  for (std::size_t c = 0; c < ds.classes; ++c) {
    require(!by_class[c].empty(), Errc::empty_class,
            "partition: class " + std::to_string(c) + " has no samples");
    require(by_class[c].size() >= clients_per_class, Errc::too_many_clients,
            "partition: class " + std::to_string(c) +
                " has fewer samples than clients_per_class");
  }

  Rng rng(derive_seed(seed, "partition"));
  PartitionManifest m;
  m.assignment.resize(ds.classes * clients_per_class);
  m.scheme = "single_class";
  m.alpha = 0.0;
  m.seed = seed;

  for (std::size_t c = 0; c < ds.classes; ++c) {
    auto& pool = by_class[c];
    rng.shuffle(pool);
    // Even split of this class across its clients, remainder to the first.
    const std::size_t base = pool.size() / clients_per_class;
    const std::size_t extra = pool.size() % clients_per_class;
    std::size_t cursor = 0;
    for (std::size_t j = 0; j < clients_per_class; ++j) {
      const std::size_t take = base + (j < extra ? 1 : 0);
      auto& dst = m.assignment[c * clients_per_class + j];
      dst.insert(dst.end(), pool.begin() + cursor, pool.begin() + cursor + take);
      cursor += take;
    }
  }

  for (auto& a : m.assignment) std::sort(a.begin(), a.end());
  validate_manifest(m);
  return m;
}

void write_manifest(const std::string& path, const PartitionManifest& m) {
  validate_manifest(m);
  nlohmann::ordered_json j;
  j["scheme"] = m.scheme;
  j["alpha"] = m.alpha;
  j["seed"] = m.seed;
  nlohmann::ordered_json clients = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < m.assignment.size(); ++k) {
    clients[std::to_string(k)] = m.assignment[k];
  }
  j["clients"] = std::move(clients);
  atomic_write_file(path, j.dump(1) + "\n");
}

PartitionManifest read_manifest(const std::string& path) {
  const std::string buf = slurp(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::invalid_manifest, path + ": not valid JSON: " + e.what());
  }

  PartitionManifest m;
  try {
    require(j.contains("scheme") && j.contains("clients"), Errc::invalid_manifest,
            path + ": missing scheme or clients key");
    m.scheme = j.at("scheme").get<std::string>();
    m.alpha = j.value("alpha", 0.0);
    m.seed = j.value("seed", std::uint64_t{0});
    const auto& clients = j.at("clients");
    require(clients.is_object(), Errc::invalid_manifest,
            path + ": clients must be an object");
    m.assignment.resize(clients.size());
    for (std::size_t k = 0; k < m.assignment.size(); ++k) {
      const std::string key = std::to_string(k);
      require(clients.contains(key), Errc::invalid_manifest,
              path + ": missing client key " + key);
      m.assignment[k] = clients.at(key).get<std::vector<std::uint64_t>>();
      std::sort(m.assignment[k].begin(), m.assignment[k].end());
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::invalid_manifest, path + ": malformed manifest: " + e.what());
  }
  validate_manifest(m);
  return m;
}

Matrix gather_rows(const Matrix& m, const std::vector<std::uint64_t>& idx) {
  Matrix out(idx.size(), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    require(idx[i] < m.rows(), Errc::invalid_argument,
            "gather_rows: index out of range");
    std::copy(m.row(idx[i]), m.row(idx[i]) + m.cols(), out.row(i));
  }
  return out;
}

std::vector<std::uint32_t> gather_labels(const std::vector<std::uint32_t>& labels,
                                         const std::vector<std::uint64_t>& idx) {
  std::vector<std::uint32_t> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    require(idx[i] < labels.size(), Errc::invalid_argument,
            "gather_labels: index out of range");
    out[i] = labels[idx[i]];
  }
  return out;
}

}  // namespace fed3r

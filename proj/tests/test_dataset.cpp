#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>

#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/ridge.hpp"
#include "core/rng.hpp"
#include "test_support.hpp"

using namespace fed3r;

namespace {

// Mean per-client label entropy (nats) under a manifest.
double mean_client_entropy(const FeatureDataset& ds, const PartitionManifest& m) {
  double total = 0.0;
  for (const auto& rows : m.assignment) {
    std::vector<std::size_t> hist(ds.classes, 0);
    for (std::uint64_t i : rows) ++hist[ds.labels[i]];
    double h = 0.0;
    for (std::size_t c : hist) {
      if (c == 0) continue;
      const double p = static_cast<double>(c) / static_cast<double>(rows.size());
      h -= p * std::log(p);
    }
    total += h;
  }
  return total / static_cast<double>(m.client_count());
}

}  // namespace

TEST_CASE("generator is deterministic and balanced") {
  const FeatureDataset a = gen_gaussian_mixture(4, 8, 25, 3.0, 2.0, 11);
  const FeatureDataset b = gen_gaussian_mixture(4, 8, 25, 3.0, 2.0, 11);
  REQUIRE(a.count() == 100);
  for (std::size_t i = 0; i < a.features.size(); ++i) {
    CHECK(a.features.data()[i] == b.features.data()[i]);
  }
  CHECK(a.labels == b.labels);

  std::vector<std::size_t> hist(4, 0);
  for (auto y : a.labels) ++hist[y];
  for (std::size_t c : hist) CHECK(c == 25);

  const FeatureDataset other = gen_gaussian_mixture(4, 8, 25, 3.0, 2.0, 12);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.features.size(); ++i) {
    if (a.features.data()[i] != other.features.data()[i]) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("zero separation means chance-level accuracy") {
  const FeatureDataset ds = gen_gaussian_mixture(5, 8, 200, 0.0, 1.0, 3);
  const Classifier cls =
      centralized_rr(ds.features, ds.labels, ds.classes, 0.01);
  const double acc = evaluate_accuracy(cls, ds);
  CHECK(std::abs(acc - 0.2) < 5.0 / std::sqrt(double(ds.count())));
}

TEST_CASE("wide separation makes the mixture linearly separable") {
  const FeatureDataset ds = gen_gaussian_mixture(10, 16, 50, 10.0, 1.0, 7);
  const Classifier cls =
      centralized_rr(ds.features, ds.labels, ds.classes, 0.01);
  CHECK(evaluate_accuracy(cls, ds) >= 0.99);
}

TEST_CASE("generator validates its parameters") {
  CHECK_THROWS_AS(gen_gaussian_mixture(1, 8, 10, 1.0, 1.0, 0), Error);
  CHECK_THROWS_AS(gen_gaussian_mixture(3, 1, 10, 1.0, 1.0, 0), Error);
  CHECK_THROWS_AS(gen_gaussian_mixture(3, 8, 10, -1.0, 1.0, 0), Error);
  CHECK_THROWS_AS(gen_gaussian_mixture(3, 8, 10, 1.0, 0.5, 0), Error);
}

TEST_CASE("feature file round trip is exact on the stored 32-bit payload") {
  const FeatureDataset ds = gen_gaussian_mixture(3, 5, 11, 2.0, 1.0, 9);
  test::TempDir dir;
  const std::string path = dir.file("ds.f3rd");
  write_features(path, ds);
  const FeatureDataset back = read_features(path);
  REQUIRE(back.count() == ds.count());
  CHECK(back.dim() == ds.dim());
  CHECK(back.classes == ds.classes);
  CHECK(back.labels == ds.labels);
  for (std::size_t i = 0; i < ds.features.size(); ++i) {
    // Storage is f32; the readback must equal the f32 cast exactly.
    CHECK(back.features.data()[i] ==
          static_cast<double>(static_cast<float>(ds.features.data()[i])));
  }

  // Second write of the readback is byte-identical.
  const std::string path2 = dir.file("ds2.f3rd");
  write_features(path2, back);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)),
                       std::istreambuf_iterator<char>());
  const std::string b2((std::istreambuf_iterator<char>(f2)),
                       std::istreambuf_iterator<char>());
  CHECK(b1 == b2);
}

TEST_CASE("empty feature file is valid") {
  FeatureDataset ds;
  ds.classes = 3;
  ds.features = Matrix(0, 4);
  test::TempDir dir;
  const std::string path = dir.file("empty.f3rd");
  write_features(path, ds);
  const FeatureDataset back = read_features(path);
  CHECK(back.count() == 0);
  CHECK(back.dim() == 4);
  CHECK(back.classes == 3);
}

TEST_CASE("feature reader fails atomically on bad files") {
  const FeatureDataset ds = gen_gaussian_mixture(3, 4, 8, 2.0, 1.0, 1);
  test::TempDir dir;
  const std::string path = dir.file("ds.f3rd");
  write_features(path, ds);
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  in.close();

  atomic_write_file(dir.file("trunc.f3rd"), bytes.substr(0, bytes.size() - 7));
  try {
    read_features(dir.file("trunc.f3rd"));
    FAIL("expected truncated_file");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::truncated_file);
  }

  std::string bad = bytes;
  bad[1] = 'Z';
  atomic_write_file(dir.file("magic.f3rd"), bad);
  try {
    read_features(dir.file("magic.f3rd"));
    FAIL("expected bad_magic");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bad_magic);
  }

  std::string vers = bytes;
  vers[4] = 9;  // version field
  atomic_write_file(dir.file("vers.f3rd"), vers);
  try {
    read_features(dir.file("vers.f3rd"));
    FAIL("expected version_unsupported");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::version_unsupported);
  }

  CHECK_THROWS_AS(read_features(dir.file("missing.f3rd")), Error);
}

TEST_CASE("dirichlet partition satisfies the manifest invariants") {
  const FeatureDataset ds = gen_gaussian_mixture(6, 4, 40, 2.0, 1.0, 5);
  for (double alpha : {0.1, 1.0, 100.0}) {
    const PartitionManifest m = partition_dirichlet(ds, 12, alpha, 17);
    CHECK(m.client_count() == 12);
    CHECK(m.total_samples() == ds.count());
    validate_manifest(m);  // throws on violation
    for (const auto& a : m.assignment) CHECK(!a.empty());
  }
}

TEST_CASE("dirichlet partition is deterministic in the seed") {
  const FeatureDataset ds = gen_gaussian_mixture(4, 4, 30, 2.0, 1.0, 5);
  const PartitionManifest a = partition_dirichlet(ds, 8, 0.5, 99);
  const PartitionManifest b = partition_dirichlet(ds, 8, 0.5, 99);
  CHECK(a.assignment == b.assignment);
}

TEST_CASE("near-IID concentration at large alpha") {
  const FeatureDataset ds = gen_gaussian_mixture(5, 4, 200, 2.0, 1.0, 13);
  // n/K = 200 >= 100 per client.
  const PartitionManifest m = partition_dirichlet(ds, 5, 100.0, 7);
  std::vector<double> global(ds.classes, 0.0);
  for (auto y : ds.labels) global[y] += 1.0 / static_cast<double>(ds.count());
  for (const auto& rows : m.assignment) {
    std::vector<double> local(ds.classes, 0.0);
    for (std::uint64_t i : rows) {
      local[ds.labels[i]] += 1.0 / static_cast<double>(rows.size());
    }
    double tv = 0.0;
    for (std::size_t c = 0; c < ds.classes; ++c) {
      tv += 0.5 * std::abs(local[c] - global[c]);
    }
    CHECK(tv <= 0.2);
  }
}

TEST_CASE("single client owns everything") {
  const FeatureDataset ds = gen_gaussian_mixture(3, 4, 10, 2.0, 1.0, 2);
  const PartitionManifest m = partition_dirichlet(ds, 1, 1.0, 3);
  REQUIRE(m.client_count() == 1);
  CHECK(m.assignment[0].size() == ds.count());
}

TEST_CASE("more clients than samples is rejected") {
  const FeatureDataset ds = gen_gaussian_mixture(2, 4, 3, 2.0, 1.0, 2);
  try {
    partition_dirichlet(ds, 100, 1.0, 3);
    FAIL("expected too_many_clients");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::too_many_clients);
  }
  CHECK_THROWS_AS(partition_dirichlet(ds, 2, 0.0, 3), Error);
}

TEST_CASE("heterogeneity rises as alpha falls") {
  const FeatureDataset ds = gen_gaussian_mixture(8, 4, 50, 2.0, 1.0, 21);
  double low = 0.0, high = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    low += mean_client_entropy(ds, partition_dirichlet(ds, 10, 0.1, seed));
    high += mean_client_entropy(ds, partition_dirichlet(ds, 10, 10.0, seed));
  }
  CHECK(low / 20.0 < high / 20.0);
}

TEST_CASE("single-class partition puts one label per client") {
  const FeatureDataset ds = gen_gaussian_mixture(10, 4, 30, 2.0, 1.0, 19);
  const PartitionManifest m = partition_single_class(ds, 23);
  REQUIRE(m.client_count() == 10);
  CHECK(m.scheme == "single_class");
  CHECK(m.total_samples() == ds.count());

  std::set<std::uint64_t> all;
  for (const auto& rows : m.assignment) {
    std::set<std::uint32_t> labels;
    for (std::uint64_t i : rows) {
      labels.insert(ds.labels[i]);
      all.insert(i);
    }
    CHECK(labels.size() == 1);  // exactly one nonzero histogram bin
  }
  CHECK(all.size() == ds.count());
}

TEST_CASE("single-class partition can split classes across clients") {
  const FeatureDataset ds = gen_gaussian_mixture(4, 4, 30, 2.0, 1.0, 19);
  const PartitionManifest m = partition_single_class(ds, 23, 3);
  CHECK(m.client_count() == 12);
  for (const auto& rows : m.assignment) CHECK(rows.size() == 10);
}

TEST_CASE("single-class partition requires every class populated") {
  FeatureDataset ds;
  ds.classes = 3;
  ds.features = Matrix(4, 2);
  ds.labels = {0, 0, 1, 1};  // class 2 missing
  try {
    partition_single_class(ds, 1);
    FAIL("expected empty_class");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_class);
  }
}

TEST_CASE("manifest round trip preserves the assignment") {
  const FeatureDataset ds = gen_gaussian_mixture(5, 4, 30, 2.0, 1.0, 29);
  const PartitionManifest m = partition_dirichlet(ds, 9, 0.3, 31);
  test::TempDir dir;
  const std::string path = dir.file("manifest.json");
  write_manifest(path, m);
  const PartitionManifest back = read_manifest(path);
  CHECK(back.assignment == m.assignment);
  CHECK(back.scheme == m.scheme);
  CHECK(back.alpha == m.alpha);
  CHECK(back.seed == m.seed);
}

TEST_CASE("manifest reader rejects structural violations") {
  test::TempDir dir;

  const std::string overlap = R"({
    "scheme": "dirichlet", "alpha": 1.0, "seed": 0,
    "clients": {"0": [0, 1], "1": [1, 2]}
  })";
  atomic_write_file(dir.file("overlap.json"), overlap);
  try {
    read_manifest(dir.file("overlap.json"));
    FAIL("expected invalid_manifest");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_manifest);
  }

  const std::string missing_key = R"({
    "scheme": "dirichlet", "alpha": 1.0, "seed": 0,
    "clients": {"0": [0, 1], "2": [2, 3]}
  })";
  atomic_write_file(dir.file("missing.json"), missing_key);
  CHECK_THROWS_AS(read_manifest(dir.file("missing.json")), Error);

  const std::string gap = R"({
    "scheme": "dirichlet", "alpha": 1.0, "seed": 0,
    "clients": {"0": [0, 1], "1": [3]}
  })";
  atomic_write_file(dir.file("gap.json"), gap);
  CHECK_THROWS_AS(read_manifest(dir.file("gap.json")), Error);

  const std::string empty_client = R"({
    "scheme": "dirichlet", "alpha": 1.0, "seed": 0,
    "clients": {"0": [0, 1, 2], "1": []}
  })";
  atomic_write_file(dir.file("empty.json"), empty_client);
  CHECK_THROWS_AS(read_manifest(dir.file("empty.json")), Error);

  atomic_write_file(dir.file("notjson.json"), "scheme: dirichlet\n");
  CHECK_THROWS_AS(read_manifest(dir.file("notjson.json")), Error);
}

#include "federation.hpp"

#include <algorithm>
#include <numeric>

#include "error.hpp"
#include "parallel.hpp"

namespace fed3r {

ClientSampler::ClientSampler(std::size_t clients, SamplingMode mode, Rng rng)
    : clients_(clients), mode_(mode), rng_(rng), pool_(clients) {
  require(clients >= 1, Errc::invalid_argument, "sampler: need >= 1 client");
  std::iota(pool_.begin(), pool_.end(), 0);
  if (mode_ == SamplingMode::without_replacement) {
    rng_.shuffle(pool_);
  }
}

std::vector<std::uint32_t> ClientSampler::next_round(
    std::size_t clients_per_round) {
  require(clients_per_round >= 1 && clients_per_round <= clients_,
          Errc::invalid_argument,
          "sampler: clients_per_round must be in [1, clients]");
  std::vector<std::uint32_t> batch;
  if (mode_ == SamplingMode::without_replacement) {
    require(cursor_ < clients_, Errc::pool_exhausted,
            "sampler: every client has already been drawn");
    const std::size_t take = std::min(clients_per_round, clients_ - cursor_);
    batch.assign(pool_.begin() + cursor_, pool_.begin() + cursor_ + take);
    cursor_ += take;
  } else {
    batch = rng_.sample_distinct(pool_, clients_per_round);
  }
  std::sort(batch.begin(), batch.end());
  return batch;
}

bool ClientSampler::exhausted() const {
  return mode_ == SamplingMode::without_replacement && cursor_ >= clients_;
}

namespace {

struct RunContext {
  std::size_t clients = 0;
  std::size_t stat_dim = 0;
  Algorithm algorithm = Algorithm::fed3r;
  CostParams cost;
};

RunContext prepare_context(const FeatureDataset& ds,
                           const PartitionManifest& manifest,
                           const FederationConfig& cfg) {
  validate_dataset(ds);
  validate_manifest(manifest);
  require(manifest.total_samples() == ds.count(), Errc::dimension_mismatch,
          "run: manifest covers a different sample count than the dataset");
  RunContext ctx;
  ctx.clients = manifest.client_count();
  if (cfg.clients != 0) {
    require(cfg.clients == ctx.clients, Errc::dimension_mismatch,
            "run: configured client count does not match the manifest");
  }
  require(cfg.clients_per_round >= 1 && cfg.clients_per_round <= ctx.clients,
          Errc::invalid_argument,
          "run: clients_per_round must be in [1, clients]");
  require(cfg.ridge_lambda > 0.0, Errc::invalid_argument,
          "run: ridge_lambda must be positive");

  ctx.stat_dim = ds.dim();
  ctx.cost = cfg.cost;
  ctx.cost.feature_dim = ds.dim();
  ctx.cost.classes = ds.classes;
  ctx.cost.clients = ctx.clients;
  ctx.cost.clients_per_round = cfg.clients_per_round;
  if (cfg.rff) {
    require(cfg.rff->output_dim >= 1, Errc::invalid_argument,
            "run: rff output_dim must be >= 1");
    ctx.stat_dim = cfg.rff->output_dim;
    ctx.cost.rff_dim = cfg.rff->output_dim;
    ctx.algorithm = Algorithm::fed3r_rf;
  }
  return ctx;
}

}  // namespace

FedRunResult run_fed3r(const FeatureDataset& ds,
                       const PartitionManifest& manifest,
                       const FederationConfig& cfg,
                       const FeatureDataset* eval_ds) {
  const RunContext ctx = prepare_context(ds, manifest, cfg);
  const std::size_t classes = ds.classes;

  FedRunResult result;
  if (cfg.rff) {
    const std::uint64_t map_seed =
        cfg.rff->seed ? *cfg.rff->seed : derive_seed(cfg.seed, "rff");
    result.rff_map =
        sample_rff(ds.dim(), cfg.rff->output_dim, cfg.rff->sigma, map_seed);
  }

  // Evaluation features, mapped once when a random-feature map is active.
  const FeatureDataset& eval_src = eval_ds ? *eval_ds : ds;
  FeatureDataset eval_set;
  eval_set.classes = eval_src.classes;
  eval_set.labels = eval_src.labels;
  eval_set.features = result.rff_map
                          ? apply_rff(*result.rff_map, eval_src.features)
                          : eval_src.features;

  ClientSampler sampler(ctx.clients, cfg.sampling,
                        Rng(derive_seed(cfg.seed, "sampling")));

  RRStatistics folded = zero_stats(ctx.stat_dim, classes);
  std::vector<bool> seen(ctx.clients, false);
  std::size_t distinct = 0;
  CostLedger ledger;
  const CommValues per_upload = comm_per_client(ctx.algorithm, ctx.cost);

  std::size_t round = 0;
  bool done = false;
  while (!done) {
    ++round;
    const std::vector<std::uint32_t> batch =
        sampler.next_round(cfg.clients_per_round);

    std::vector<std::uint32_t> fresh;
    fresh.reserve(batch.size());
    for (std::uint32_t id : batch) {
      if (!seen[id]) fresh.push_back(id);
    }

    // Client-side work: local statistics for first-time participants, in
    // parallel over disjoint slots. Ascending-id fold afterwards keeps the
    // result independent of the schedule.
    std::vector<RRStatistics> slots(fresh.size());
    parallel_for(fresh.size(), cfg.threads, [&](std::size_t i) {
      const auto& rows = manifest.assignment[fresh[i]];
      Matrix shard = gather_rows(ds.features, rows);
      if (result.rff_map) shard = apply_rff(*result.rff_map, shard);
      slots[i] = compute_local_stats(shard, gather_labels(ds.labels, rows),
                                     classes);
    });
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      folded = merge_stats(folded, slots[i]);
      seen[fresh[i]] = true;
    }
    distinct += fresh.size();

    // Every upload costs bandwidth, including duplicates the server ignores;
    // compute accrues only on first participation (clients keep their
    // statistics cached between uploads).
    ledger.up_bytes += per_upload.up_bytes() * batch.size();
    ledger.down_bytes += per_upload.down_bytes() * batch.size();
    for (std::uint32_t id : fresh) {
      ledger.client_flops_total += compute_per_round_per_client(
          ctx.algorithm, ctx.cost, manifest.assignment[id].size());
      if (cfg.rff && cfg.charge_rff_transfer) {
        ledger.down_bytes += kBytesPerValue *
                             static_cast<std::uint64_t>(ds.dim()) *
                             cfg.rff->output_dim;
      }
    }

    if (cfg.sampling == SamplingMode::without_replacement) {
      done = sampler.exhausted();
    } else {
      done = distinct == ctx.clients ||
             (cfg.rounds_max > 0 && round >= cfg.rounds_max);
    }

    RoundRecord rec;
    rec.round = round;
    rec.sampled = batch;
    rec.new_clients = fresh.size();
    rec.distinct_clients_cum = distinct;
    rec.down_bytes_cum = ledger.down_bytes;
    rec.up_bytes_cum = ledger.up_bytes;
    rec.avg_client_flops_cum = ledger.avg_client_flops(ctx.clients);

    const bool eval_now =
        done || (cfg.eval_every > 0 && round % cfg.eval_every == 0);
    if (eval_now && folded.count > 0) {
      result.classifier =
          normalize_columns(solve_classifier(folded, cfg.ridge_lambda));
      rec.accuracy = evaluate_accuracy(result.classifier, eval_set);
    }
    result.trace.rounds.push_back(std::move(rec));
  }

  result.statistics = std::move(folded);
  return result;
}

}  // namespace fed3r

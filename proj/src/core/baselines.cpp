#include "baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "error.hpp"
#include "parallel.hpp"

namespace fed3r {

Classifier fedncm_fit(const FeatureDataset& ds, const PartitionManifest& manifest,
                      std::vector<std::size_t>* empty_classes) {
  validate_dataset(ds);
  validate_manifest(manifest);
  require(manifest.total_samples() == ds.count(), Errc::dimension_mismatch,
          "fedncm: manifest covers a different sample count than the dataset");

  const std::size_t dim = ds.dim();
  const std::size_t classes = ds.classes;
  Matrix sums(dim, classes);
  std::vector<std::uint64_t> counts(classes, 0);

  // Server-side fold of per-client (per-class sum, count) contributions in
  // ascending client id; the summary is mergeable exactly like the ridge
  // statistics.
  for (const auto& rows : manifest.assignment) {
    for (std::uint64_t idx : rows) {
      const std::uint32_t y = ds.labels[idx];
      const double* z = ds.features.row(idx);
      for (std::size_t j = 0; j < dim; ++j) sums(j, y) += z[j];
      ++counts[y];
    }
  }

  Classifier cls;
  cls.weights = Matrix(dim, classes);
  for (std::size_t c = 0; c < classes; ++c) {
    if (counts[c] == 0) continue;
    const double inv = 1.0 / static_cast<double>(counts[c]);
    for (std::size_t j = 0; j < dim; ++j) cls.weights(j, c) = sums(j, c) * inv;
  }
  return normalize_columns(cls, empty_classes);
}

std::vector<double> softmax_forward(const Classifier& cls,
                                    std::span<const double> features) {
  require(cls.temperature > 0.0, Errc::invalid_argument,
          "softmax: temperature must be positive");
  require(features.size() == cls.dim(), Errc::dimension_mismatch,
          "softmax: feature dimension must match classifier");
  std::vector<double> logits(cls.classes(), 0.0);
  for (std::size_t j = 0; j < cls.dim(); ++j) {
    const double zj = features[j];
    for (std::size_t c = 0; c < cls.classes(); ++c) {
      logits[c] += cls.weights(j, c) * zj;
    }
  }
  double max_logit = -std::numeric_limits<double>::infinity();
  for (double& l : logits) {
    l /= cls.temperature;
    max_logit = std::max(max_logit, l);
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < cls.classes(); ++c) {
    logits[c] = std::exp(logits[c] - max_logit);
    sum += logits[c];
  }
  for (double& p : logits) p /= sum;
  return logits;
}

namespace {

// Row-wise softmax of Z W / temperature with max subtraction. Also returns
// the mean cross-entropy against the labels, computed in log-sum-exp form so
// it stays finite for any logit magnitude.
std::pair<double, Matrix> softmax_and_loss(
    const Matrix& weights, double temperature, const Matrix& batch_features,
    const std::vector<std::uint32_t>& batch_labels) {
  Matrix probs = matmul(batch_features, weights);
  const std::size_t n = probs.rows();
  const std::size_t classes = probs.cols();
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double* row = probs.row(i);
    double max_logit = row[0] / temperature;
    for (std::size_t c = 0; c < classes; ++c) {
      row[c] /= temperature;
      max_logit = std::max(max_logit, row[c]);
    }
    const double target_shifted = row[batch_labels[i]] - max_logit;
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      row[c] = std::exp(row[c] - max_logit);
      sum += row[c];
    }
    loss += std::log(sum) - target_shifted;
    for (std::size_t c = 0; c < classes; ++c) row[c] /= sum;
  }
  return {loss / static_cast<double>(n), std::move(probs)};
}

}  // namespace

std::pair<double, Matrix> ce_loss_and_grad(
    const Matrix& weights, double temperature, const Matrix& batch_features,
    const std::vector<std::uint32_t>& batch_labels) {
  require(!batch_labels.empty(), Errc::empty_dataset,
          "ce_loss_and_grad: batch must be nonempty");
  require(batch_labels.size() == batch_features.rows(), Errc::dimension_mismatch,
          "ce_loss_and_grad: label count must match batch rows");
  require(temperature > 0.0, Errc::invalid_argument,
          "ce_loss_and_grad: temperature must be positive");

  auto [loss, probs] = softmax_and_loss(weights, temperature, batch_features,
                                        batch_labels);
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    probs(i, batch_labels[i]) -= 1.0;
  }
  Matrix grad = cross(batch_features, probs);
  const double scale =
      1.0 / (temperature * static_cast<double>(batch_labels.size()));
  for (std::size_t i = 0; i < grad.size(); ++i) grad.data()[i] *= scale;
  return {loss, std::move(grad)};
}

double mean_ce_loss(const Matrix& weights, double temperature,
                    const FeatureDataset& ds) {
  require(ds.count() > 0, Errc::empty_dataset, "mean_ce_loss: empty dataset");
  return softmax_and_loss(weights, temperature, ds.features, ds.labels).first;
}

Matrix local_sgd_lp(const Matrix& weights_in, const Matrix& shard_features,
                    const std::vector<std::uint32_t>& shard_labels,
                    std::size_t classes, const LPConfig& cfg, Rng& rng) {
  require(!shard_labels.empty(), Errc::empty_dataset,
          "local_sgd_lp: shard must be nonempty");
  require(cfg.batch_size >= 1 && cfg.local_epochs >= 1, Errc::invalid_argument,
          "local_sgd_lp: batch_size and local_epochs must be >= 1");
  (void)classes;

  Matrix w = weights_in;
  std::vector<std::uint64_t> order(shard_labels.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < cfg.local_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(start + cfg.batch_size, order.size());
      const std::vector<std::uint64_t> batch_idx(order.begin() + start,
                                                 order.begin() + stop);
      const Matrix bz = gather_rows(shard_features, batch_idx);
      const std::vector<std::uint32_t> by =
          gather_labels(shard_labels, batch_idx);
      auto [loss, grad] = ce_loss_and_grad(w, cfg.temperature, bz, by);
      (void)loss;
      for (std::size_t i = 0; i < w.size(); ++i) {
        w.data()[i] -= cfg.lr * (grad.data()[i] + cfg.weight_decay * w.data()[i]);
      }
    }
  }
  return w;
}

Matrix server_aggregate(const std::vector<std::pair<Matrix, std::uint64_t>>& locals,
                        const Matrix& base, double server_lr,
                        double server_momentum, Matrix& momentum_state) {
  require(!locals.empty(), Errc::invalid_argument,
          "server_aggregate: no client models");
  std::uint64_t total = 0;
  for (const auto& [w, n_k] : locals) {
    require(w.same_shape(base), Errc::dimension_mismatch,
            "server_aggregate: client model shape mismatch");
    total += n_k;
  }
  require(total > 0, Errc::invalid_argument,
          "server_aggregate: total sample weight is zero");
  if (momentum_state.size() == 0) {
    momentum_state = Matrix(base.rows(), base.cols());
  }

  Matrix average(base.rows(), base.cols());
  for (const auto& [w, n_k] : locals) {
    const double coeff = static_cast<double>(n_k) / static_cast<double>(total);
    for (std::size_t i = 0; i < average.size(); ++i) {
      average.data()[i] += coeff * w.data()[i];
    }
  }

  Matrix out = base;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double delta = base.data()[i] - average.data()[i];
    momentum_state.data()[i] = server_momentum * momentum_state.data()[i] + delta;
    out.data()[i] -= server_lr * momentum_state.data()[i];
  }
  return out;
}

double calibrate_temperature(const Classifier& cls, const FeatureDataset& ds,
                             std::vector<double> grid) {
  require(!grid.empty(), Errc::empty_grid,
          "calibrate_temperature: grid must be nonempty");
  require(ds.count() > 0, Errc::empty_dataset,
          "calibrate_temperature: dataset must be nonempty");
  for (double t : grid) {
    require(t > 0.0, Errc::invalid_argument,
            "calibrate_temperature: temperatures must be positive");
  }
  std::sort(grid.begin(), grid.end());
  double best_tau = grid.front();
  double best_loss = std::numeric_limits<double>::infinity();
  for (double tau : grid) {
    const double loss = mean_ce_loss(cls.weights, tau, ds);
    if (loss < best_loss) {  // ascending grid: ties keep the smaller tau
      best_loss = loss;
      best_tau = tau;
    }
  }
  return best_tau;
}

LPRunResult run_lp(const FeatureDataset& ds, const PartitionManifest& manifest,
                   const LPConfig& lp_cfg, const FederationConfig& fed_cfg,
                   const Classifier* init_classifier,
                   const FeatureDataset* eval_ds) {
  validate_dataset(ds);
  validate_manifest(manifest);
  require(manifest.total_samples() == ds.count(), Errc::dimension_mismatch,
          "run_lp: manifest covers a different sample count than the dataset");
  require(lp_cfg.lr >= 0.0 && lp_cfg.temperature > 0.0 && lp_cfg.rounds >= 1,
          Errc::invalid_argument, "run_lp: invalid hyper-parameters");

  const std::size_t clients = manifest.client_count();
  if (fed_cfg.clients != 0) {
    require(fed_cfg.clients == clients, Errc::dimension_mismatch,
            "run_lp: configured client count does not match the manifest");
  }
  const std::size_t per_round =
      std::min(fed_cfg.clients_per_round, clients);

  Matrix w(ds.dim(), ds.classes);
  if (lp_cfg.init == LPInit::fed3r) {
    require(init_classifier != nullptr, Errc::invalid_argument,
            "run_lp: fed3r init requires a solved classifier");
    require(init_classifier->dim() == ds.dim() &&
                init_classifier->classes() == ds.classes,
            Errc::dimension_mismatch, "run_lp: init classifier shape mismatch");
    w = init_classifier->weights;
  } else {
    Rng init_rng(derive_seed(fed_cfg.seed, "lp_init"));
    for (std::size_t i = 0; i < w.size(); ++i) {
      w.data()[i] = init_rng.normal(0.0, 0.01);
    }
  }

  CostParams cost = fed_cfg.cost;
  cost.feature_dim = ds.dim();
  cost.classes = ds.classes;
  cost.clients = clients;
  cost.clients_per_round = per_round;
  cost.local_epochs = lp_cfg.local_epochs;
  const Algorithm alg = lp_cfg.server_momentum > 0.0 ? Algorithm::fedavgm_lp
                                                     : Algorithm::fedavg_lp;
  const CommValues comm = comm_per_client(alg, cost);

  const FeatureDataset& eval_set = eval_ds ? *eval_ds : ds;

  ClientSampler sampler(clients, SamplingMode::with_replacement,
                        Rng(derive_seed(fed_cfg.seed, "sampling")));
  Matrix momentum_state;
  std::vector<bool> seen(clients, false);
  std::size_t distinct = 0;
  CostLedger ledger;

  LPRunResult result;
  for (std::size_t round = 1; round <= lp_cfg.rounds; ++round) {
    const std::vector<std::uint32_t> batch = sampler.next_round(per_round);

    std::vector<std::pair<Matrix, std::uint64_t>> locals(batch.size());
    parallel_for(batch.size(), fed_cfg.threads, [&](std::size_t i) {
      const std::uint32_t id = batch[i];
      const auto& rows = manifest.assignment[id];
      const Matrix shard = gather_rows(ds.features, rows);
      const std::vector<std::uint32_t> labels = gather_labels(ds.labels, rows);
      // Per-client per-round stream, so scheduling cannot change results.
      Rng rng(derive_seed(fed_cfg.seed, "sgd/" + std::to_string(id) + "/" +
                                            std::to_string(round)));
      locals[i] = {local_sgd_lp(w, shard, labels, ds.classes, lp_cfg, rng),
                   rows.size()};
    });
    w = server_aggregate(locals, w, lp_cfg.server_lr, lp_cfg.server_momentum,
                         momentum_state);

    std::size_t fresh = 0;
    for (std::uint32_t id : batch) {
      if (!seen[id]) {
        seen[id] = true;
        ++fresh;
        ++distinct;
      }
      ledger.up_bytes += comm.up_bytes();
      ledger.down_bytes += comm.down_bytes();
      ledger.client_flops_total += compute_per_round_per_client(
          alg, cost, manifest.assignment[id].size());
    }

    RoundRecord rec;
    rec.round = round;
    rec.sampled = batch;
    rec.new_clients = fresh;
    rec.distinct_clients_cum = distinct;
    rec.down_bytes_cum = ledger.down_bytes;
    rec.up_bytes_cum = ledger.up_bytes;
    rec.avg_client_flops_cum = ledger.avg_client_flops(clients);

    const bool eval_now = round == lp_cfg.rounds ||
                          (fed_cfg.eval_every > 0 &&
                           round % fed_cfg.eval_every == 0);
    if (eval_now) {
      Classifier snapshot{w, lp_cfg.temperature, false};
      rec.accuracy = evaluate_accuracy(snapshot, eval_set);
    }
    result.trace.rounds.push_back(std::move(rec));
  }

  result.classifier = Classifier{std::move(w), lp_cfg.temperature, false};
  return result;
}

}  // namespace fed3r

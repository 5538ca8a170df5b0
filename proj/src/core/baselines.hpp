#ifndef FED3R_CORE_BASELINES_HPP
#define FED3R_CORE_BASELINES_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dataset.hpp"
#include "federation.hpp"
#include "matrix.hpp"
#include "ridge.hpp"
#include "rng.hpp"

namespace fed3r {

enum class LPInit { random, fed3r };

// Hyper-parameters for softmax linear probing over frozen features.
struct LPConfig {
  double lr = 0.1;
  double weight_decay = 4e-5;
  std::size_t batch_size = 50;
  std::size_t local_epochs = 5;
  double server_lr = 1.0;
  double server_momentum = 0.0;
  std::size_t rounds = 100;
  double temperature = 1.0;
  LPInit init = LPInit::random;
};

// Nearest-class-mean classifier computed federatedly: clients contribute
// per-class feature sums and counts, the server divides and unit-normalizes
// the columns. Classes absent from the data yield zero columns, reported via
// empty_classes.
Classifier fedncm_fit(const FeatureDataset& ds, const PartitionManifest& manifest,
                      std::vector<std::size_t>* empty_classes = nullptr);

// softmax(W^T z / temperature), computed with max subtraction.
std::vector<double> softmax_forward(const Classifier& cls,
                                    std::span<const double> features);

// Mean cross-entropy over the batch and its gradient
// (1/temperature) * Z^T (P - Y) / batch_size. Weight decay is the caller's
// responsibility.
std::pair<double, Matrix> ce_loss_and_grad(
    const Matrix& weights, double temperature, const Matrix& batch_features,
    const std::vector<std::uint32_t>& batch_labels);

double mean_ce_loss(const Matrix& weights, double temperature,
                    const FeatureDataset& ds);

// local_epochs passes of mini-batch SGD on cross-entropy plus weight decay;
// batches reshuffled per epoch, last partial batch kept.
Matrix local_sgd_lp(const Matrix& weights_in, const Matrix& shard_features,
                    const std::vector<std::uint32_t>& shard_labels,
                    std::size_t classes, const LPConfig& cfg, Rng& rng);

// Pseudo-gradient aggregation: delta = base - sum(n_k/n * W_k);
// momentum_state <- momentum * momentum_state + delta;
// returns base - server_lr * momentum_state. Zero momentum and unit server
// learning rate recover the plain weighted average.
Matrix server_aggregate(const std::vector<std::pair<Matrix, std::uint64_t>>& locals,
                        const Matrix& base, double server_lr,
                        double server_momentum, Matrix& momentum_state);

// Picks the grid temperature minimizing mean training cross-entropy of
// softmax(W^T z / tau); ties break toward the smaller temperature.
double calibrate_temperature(const Classifier& cls, const FeatureDataset& ds,
                             std::vector<double> grid);

struct LPRunResult {
  Classifier classifier;
  TrainingTrace trace;
};

// Round-based linear probing: clients are drawn with replacement (a fresh
// distinct batch each round), train locally in parallel, and the server
// aggregates with optional momentum. init = fed3r requires a previously
// solved classifier.
LPRunResult run_lp(const FeatureDataset& ds, const PartitionManifest& manifest,
                   const LPConfig& lp_cfg, const FederationConfig& fed_cfg,
                   const Classifier* init_classifier = nullptr,
                   const FeatureDataset* eval_ds = nullptr);

}  // namespace fed3r

#endif

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lamp/encoder.hpp"
#include "lamp/graph.hpp"
#include "lamp/losses.hpp"
#include "lamp/pruning.hpp"

namespace lamp {

struct TrainConfig {
  std::size_t hidden_dim = 32;
  std::size_t num_layers = 3;
  std::size_t batch_size = 32;
  double learning_rate = 0.01;
  int epochs = 20;
  double gamma = 0.3;
  double alpha = 1.0;
  double tau = 0.1;
  PruneStrategy strategy = PruneStrategy::Magnitude;
  std::size_t n_s = 5000;
  std::uint64_t seed = 0;
  Readout readout = Readout::Sum;
  /// Run the k-fold probe every this many epochs; 0 disables it.
  int eval_every = 10;
  /// Degree cap for one-hot degree features on datasets without node labels.
  int max_degree = 128;
  DenominatorForm denominator = DenominatorForm::ExcludePositive;
  /// Permit batch_size, learning_rate, gamma and alpha outside the tuning grids.
  bool allow_off_grid = false;
  /// Write measured seconds into the history CSV instead of 0.
  bool record_timing = false;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

const std::vector<std::size_t>& batch_size_grid();
const std::vector<double>& learning_rate_grid();
/// 0.05, 0.10, ..., 0.95
const std::vector<double>& gamma_grid();
const std::vector<double>& alpha_grid();
bool on_grid(double value, const std::vector<double>& grid);

/// Throws ConfigError on out-of-range values, and on off-grid values unless allow_off_grid.
void validate(const TrainConfig& config);
/// Human-readable notes for every off-grid value (empty when all are on the grids).
std::vector<std::string> off_grid_warnings(const TrainConfig& config);

const std::vector<std::string>& train_config_keys();
std::string train_config_json(const TrainConfig& config);
/// Missing keys keep their defaults. Unknown keys and wrongly typed values throw
/// ConfigError; the message for an unknown key lists the valid ones.
TrainConfig parse_train_config(std::string_view json);

struct EpochRecord {
  int epoch = 0;  ///< 1-based
  LossBreakdown loss;  ///< mean over the epoch's batches
  double sparsity = 0.0;
  double seconds = 0.0;
  std::optional<double> eval_mean;
  std::optional<double> eval_std;
};

struct BatchRecord {
  int epoch = 0;
  int batch = 0;
  LossBreakdown loss;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::vector<BatchRecord> batches;
};

/// `epoch,total,graph_loss,local_loss,sparsity,seconds`; seconds are written
/// as 0 unless include_seconds.
std::string history_csv(const TrainHistory& history, bool include_seconds);
/// `epoch,batch,total,graph_loss,local_loss`
std::string batch_history_csv(const TrainHistory& history);
std::string history_json(const TrainHistory& history, bool include_seconds);

/// Test and instrumentation callbacks.
struct TrainHooks {
  std::function<void(int epoch, const PruneMask& mask)> on_epoch_start;
  std::function<void(int epoch, int batch, Encoder& encoder, const PruneMask& mask)> after_batch;
};

/// Everything one dual-branch step produces on a tape.
struct PairForward {
  Var h1, h2;  ///< node embeddings: dense, masked
  Var z1, z2;  ///< projected graph embeddings
  Var graph_loss;
  Var local_loss;
  Var total;
};

/// Dense and masked encoder passes over the same batch, shared readout and
/// projection, then graph_loss + alpha * local_loss.
PairForward forward_pair(Encoder& encoder, ProjectionHead& head, const GraphBatch& batch,
                         const PruneMask& mask, const TrainConfig& config, Rng& anchor_rng, Tape& tape);

/// Batch membership for one epoch: a shuffle seeded from (seed, epoch), cut
/// into batch_size chunks, with a trailing single-graph chunk dropped.
std::vector<std::vector<std::size_t>> epoch_batches(std::size_t num_graphs, std::size_t batch_size,
                                                    std::uint64_t seed, int epoch);

struct PretrainResult {
  Encoder encoder;
  ProjectionHead head;
  TrainHistory history;
};

/// Initial encoder and head for a config; the same seed gives the same weights.
PretrainResult initialize_model(std::size_t input_dim, const TrainConfig& config);

PretrainResult pretrain(const Dataset& dataset, const TrainConfig& config, const TrainHooks& hooks = {});

}  // namespace lamp

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lamp/graph.hpp"
#include "lamp/trainer.hpp"

namespace lamp::cli {

namespace fs = std::filesystem;

/// Shared state for one invocation.
struct Context {
  fs::path data_dir;
  std::vector<std::string> args;  ///< full argument list, recorded in manifests
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

/// A directory path is used as-is; otherwise the name is looked up under data_dir.
fs::path resolve_dataset(const Context& ctx, const std::string& name_or_path);
/// Loads a TU dataset and, when it has no node labels, applies one-hot degree features.
Dataset load_dataset_for_model(const fs::path& dir, int max_degree);

struct AuditArgs {
  std::string dataset;
  std::string augmentation;
  double strength = 0.2;
  int repeats = 5;
  std::uint64_t seed = 0;
  fs::path out_dir = ".";
};

struct ConfigOverrides {
  std::optional<fs::path> config_file;
  std::optional<std::string> strategy;
  std::optional<double> gamma;
  std::optional<double> alpha;
  std::optional<double> learning_rate;
  std::optional<double> tau;
  std::optional<std::size_t> batch_size;
  std::optional<int> epochs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> readout;
  bool allow_off_grid = false;
  bool record_timing = false;
};

struct PretrainArgs {
  std::string dataset;
  ConfigOverrides config;
  fs::path out_dir = ".";
};

struct EmbedArgs {
  fs::path checkpoint;
  std::string dataset;
  fs::path out;
};

struct EvalArgs {
  std::optional<fs::path> checkpoint;
  std::optional<fs::path> embeddings;
  std::string dataset;
  fs::path out;
  int folds = 10;
  int repeats = 5;
  std::uint64_t seed = 0;
};

struct SweepArgs {
  std::string dataset;
  std::string axis;
  std::vector<double> values;
  ConfigOverrides config;
  fs::path out_dir = ".";
  int folds = 10;
  int repeats = 5;
};

struct ReportArgs {
  std::vector<fs::path> inputs;
  fs::path out;
};

struct RerunArgs {
  fs::path manifest;
  bool verify_only = false;
};

/// Builds a TrainConfig from an optional JSON file plus flag overrides, then validates it.
TrainConfig build_config(const ConfigOverrides& overrides, std::ostream& warn);

int cmd_audit(const Context& ctx, const AuditArgs& a);
int cmd_pretrain(const Context& ctx, const PretrainArgs& a);
int cmd_embed(const Context& ctx, const EmbedArgs& a);
int cmd_eval(const Context& ctx, const EvalArgs& a);
int cmd_sweep(const Context& ctx, const SweepArgs& a);
int cmd_report(const Context& ctx, const ReportArgs& a);
int cmd_info(const Context& ctx, const std::string& dataset);
int cmd_verify(const Context& ctx, const RerunArgs& a);

}  // namespace lamp::cli

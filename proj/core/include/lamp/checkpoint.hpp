#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "lamp/encoder.hpp"
#include "lamp/trainer.hpp"

namespace lamp {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  Encoder encoder;
  ProjectionHead head;
  TrainConfig config;
};

/// {"format": "lamp-checkpoint", "version", "architecture", "config", "parameters"}
std::string checkpoint_json(const Encoder& encoder, const ProjectionHead& head, const TrainConfig& config);
Checkpoint parse_checkpoint(std::string_view json);

void save_checkpoint(const Encoder& encoder, const ProjectionHead& head, const TrainConfig& config,
                     const std::filesystem::path& path);
/// Throws LoadError when the file cannot be read and CheckpointError when its
/// contents are malformed or inconsistent.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace lamp

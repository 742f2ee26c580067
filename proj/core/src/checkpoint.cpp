#include "lamp/checkpoint.hpp"

#include "json.hpp"
#include "lamp/error.hpp"
#include "lamp/io.hpp"
#include "lamp/param_io.hpp"

namespace lamp {
namespace {

using nlohmann::json;

std::vector<const Parameter*> all_parameters(const Encoder& encoder, const ProjectionHead& head) {
  std::vector<const Parameter*> out = encoder.parameters();
  for (const Parameter* p : head.parameters()) out.push_back(p);
  return out;
}

std::size_t arch_field(const json& arch, const char* key) {
  if (!arch.contains(key) || !arch[key].is_number_unsigned()) {
    throw CheckpointError(std::string("checkpoint architecture lacks a valid '") + key + "'");
  }
  return arch[key].get<std::size_t>();
}

}  // namespace

std::string checkpoint_json(const Encoder& encoder, const ProjectionHead& head, const TrainConfig& config) {
  const auto params = all_parameters(encoder, head);
  json j;
  j["format"] = "lamp-checkpoint";
  j["version"] = kCheckpointVersion;
  j["architecture"] = {{"input_dim", encoder.input_dim()},
                       {"hidden_dim", encoder.hidden_dim()},
                       {"num_layers", encoder.num_layers()},
                       {"readout", std::string(to_string(config.readout))}};
  j["config"] = json::parse(train_config_json(config));
  j["parameters"] = json::parse(serialize_parameters(params));
  return j.dump();
}

Checkpoint parse_checkpoint(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CheckpointError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", std::string()) != "lamp-checkpoint") {
    throw CheckpointError("not a lamp checkpoint (missing format tag)");
  }
  if (!j.contains("version") || !j["version"].is_number_integer()) throw CheckpointError("checkpoint has no version");
  const int version = j["version"].get<int>();
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  if (!j.contains("architecture") || !j["architecture"].is_object()) throw CheckpointError("checkpoint has no architecture");
  if (!j.contains("config") || !j["config"].is_object()) throw CheckpointError("checkpoint has no config");
  if (!j.contains("parameters") || !j["parameters"].is_array()) throw CheckpointError("checkpoint has no parameters");

  const json& arch = j["architecture"];
  const std::size_t input_dim = arch_field(arch, "input_dim");
  const std::size_t hidden_dim = arch_field(arch, "hidden_dim");
  const std::size_t num_layers = arch_field(arch, "num_layers");

  TrainConfig config;
  try {
    config = parse_train_config(j["config"].dump());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint config: ") + e.what());
  }
  if (config.hidden_dim != hidden_dim || config.num_layers != num_layers) {
    throw CheckpointError("checkpoint architecture (hidden_dim " + std::to_string(hidden_dim) + ", num_layers " +
                          std::to_string(num_layers) + ") disagrees with its config (hidden_dim " +
                          std::to_string(config.hidden_dim) + ", num_layers " + std::to_string(config.num_layers) + ")");
  }
  if (arch.value("readout", std::string()) != to_string(config.readout)) {
    throw CheckpointError("checkpoint readout disagrees with its config");
  }
  if (input_dim < 1 || hidden_dim < 1 || num_layers < 2) throw CheckpointError("checkpoint architecture out of range");

  Checkpoint out;
  Rng scratch(0);
  out.encoder = Encoder(input_dim, hidden_dim, num_layers, scratch);
  out.head = ProjectionHead(hidden_dim, scratch);
  out.config = config;
  std::vector<Parameter*> targets = out.encoder.parameters();
  for (Parameter* p : out.head.parameters()) targets.push_back(p);
  deserialize_parameters(j["parameters"].dump(), targets);
  return out;
}

void save_checkpoint(const Encoder& encoder, const ProjectionHead& head, const TrainConfig& config,
                     const std::filesystem::path& path) {
  write_file_atomic(path, checkpoint_json(encoder, head, config));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

}  // namespace lamp

#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lamp::cli {

struct FileRecord {
  std::string path;
  std::string sha256;
};

/// Provenance record written next to a command's outputs.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> args);

  void set_config(std::string config_json) { config_json_ = std::move(config_json); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_input(const std::filesystem::path& path);
  /// Every regular file directly inside `dir`.
  void add_input_dir(const std::filesystem::path& dir);
  void add_output(const std::filesystem::path& path);

  /// Hashes are taken at write time; the manifest is written atomically.
  void write(const std::filesystem::path& path) const;

 private:
  std::string command_;
  std::vector<std::string> args_;
  std::string cwd_;
  std::optional<std::string> config_json_;
  std::optional<std::uint64_t> seed_;
  std::vector<std::filesystem::path> inputs_;
  std::vector<std::filesystem::path> outputs_;
  std::chrono::steady_clock::time_point start_;
  std::string started_utc_;
};

struct ManifestCheck {
  std::vector<std::string> mismatched;
  std::vector<std::string> missing;
  bool ok() const { return mismatched.empty() && missing.empty(); }
};

ManifestCheck check_outputs(const std::vector<FileRecord>& records);
/// Re-hashes the outputs listed in a manifest.
ManifestCheck verify_manifest(const std::filesystem::path& manifest_path);
/// Outputs and their hashes as recorded in a manifest.
std::vector<FileRecord> manifest_outputs(const std::filesystem::path& manifest_path);
/// Arguments recorded in a manifest, for re-execution.
std::vector<std::string> manifest_args(const std::filesystem::path& manifest_path);
std::string manifest_cwd(const std::filesystem::path& manifest_path);

}  // namespace lamp::cli

#include "lamp/manifest.hpp"

#include <algorithm>
#include <ctime>

#include "json.hpp"
#include "lamp/error.hpp"
#include "lamp/io.hpp"

namespace lamp::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json files_json(const std::vector<fs::path>& paths) {
  json arr = json::array();
  for (const auto& p : paths) arr.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
  return arr;
}

json read_manifest(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": manifest is not valid JSON: " + e.what());
  }
}

}  // namespace

RunManifest::RunManifest(std::string command, std::vector<std::string> args)
    : command_(std::move(command)),
      args_(std::move(args)),
      cwd_(fs::current_path().string()),
      start_(std::chrono::steady_clock::now()),
      started_utc_(utc_now()) {}

void RunManifest::add_input(const fs::path& path) { inputs_.push_back(fs::absolute(path)); }

void RunManifest::add_input_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(fs::absolute(entry.path()));
  std::sort(files.begin(), files.end());
  inputs_.insert(inputs_.end(), files.begin(), files.end());
}

void RunManifest::add_output(const fs::path& path) { outputs_.push_back(fs::absolute(path)); }

void RunManifest::write(const fs::path& path) const {
  json j;
  j["command"] = command_;
  j["args"] = args_;
  j["cwd"] = cwd_;
  j["config"] = config_json_ ? json::parse(*config_json_) : json(nullptr);
  j["seed"] = seed_ ? json(*seed_) : json(nullptr);
  j["inputs"] = files_json(inputs_);
  j["outputs"] = files_json(outputs_);
  j["started_utc"] = started_utc_;
  j["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  write_file_atomic(path, j.dump(2) + "\n");
}

std::vector<FileRecord> manifest_outputs(const fs::path& manifest_path) {
  const json j = read_manifest(manifest_path);
  std::vector<FileRecord> out;
  for (const auto& rec : j.at("outputs")) {
    out.push_back({rec.at("path").get<std::string>(), rec.at("sha256").get<std::string>()});
  }
  return out;
}

ManifestCheck check_outputs(const std::vector<FileRecord>& records) {
  ManifestCheck check;
  for (const auto& rec : records) {
    if (!fs::exists(rec.path)) {
      check.missing.push_back(rec.path);
    } else if (sha256_file(rec.path) != rec.sha256) {
      check.mismatched.push_back(rec.path);
    }
  }
  return check;
}

ManifestCheck verify_manifest(const fs::path& manifest_path) { return check_outputs(manifest_outputs(manifest_path)); }

std::vector<std::string> manifest_args(const fs::path& manifest_path) {
  return read_manifest(manifest_path).at("args").get<std::vector<std::string>>();
}

std::string manifest_cwd(const fs::path& manifest_path) {
  return read_manifest(manifest_path).at("cwd").get<std::string>();
}

}  // namespace lamp::cli

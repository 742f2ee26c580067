#pragma once

#include <filesystem>
#include <optional>
#include <unistd.h>
#include <set>
#include <string>
#include <vector>

#include "lamp/graph.hpp"
#include "lamp/io.hpp"
#include "lamp/rng.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return LAMP_TEST_DATA_DIR; }
inline std::filesystem::path mutag_dir() { return data_dir() / "MUTAG"; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("lamp_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline lamp::Tensor random_tensor(std::size_t r, std::size_t c, lamp::Rng& rng, double lo = -1.0, double hi = 1.0) {
  lamp::Tensor t(r, c);
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

/// Erdos-Renyi style graph with random features.
inline lamp::Graph random_graph(int n, double p, std::size_t dim, lamp::Rng& rng, std::optional<int> label = {}) {
  std::vector<lamp::Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.uniform01() < p) edges.push_back({u, v});
  return lamp::Graph(n, edges, random_tensor(n, dim, rng), label);
}

/// Connected random graph: a random spanning path plus extra edges.
inline lamp::Graph random_connected_graph(int n, double p, std::size_t dim, lamp::Rng& rng,
                                          std::optional<int> label = {}) {
  std::set<lamp::Edge> edges;
  for (int v = 1; v < n; ++v) {
    int u = static_cast<int>(rng.uniform_index(v));
    edges.insert({u, v});
  }
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.uniform01() < p) edges.insert({u, v});
  return lamp::Graph(n, {edges.begin(), edges.end()}, random_tensor(n, dim, rng), label);
}

/// Small labelled dataset with two structurally different classes.
inline lamp::Dataset toy_dataset(int graphs, std::uint64_t seed, std::size_t dim = 3) {
  lamp::Rng rng(seed);
  lamp::Dataset ds;
  ds.name = "toy";
  ds.num_classes = 2;
  ds.feature_dim = dim;
  for (int i = 0; i < graphs; ++i) {
    const int label = i % 2;
    const int n = 4 + static_cast<int>(rng.uniform_index(5));
    ds.graphs.push_back(random_connected_graph(n, label == 0 ? 0.1 : 0.6, dim, rng, label));
  }
  ds.metadata.original_labels = {0, 1};
  return ds;
}

inline void write_text(const std::filesystem::path& p, const std::string& s) { lamp::write_file_atomic(p, s); }

}  // namespace testing

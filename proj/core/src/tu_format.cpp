#include "lamp/tu_format.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"
#include "lamp/error.hpp"

namespace lamp {
namespace {

namespace fs = std::filesystem;

struct Line {
  std::size_t number;
  std::string text;
};

std::vector<Line> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  std::vector<Line> lines;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    lines.push_back({number, std::move(text)});
  }
  return lines;
}

[[noreturn]] void format_fail(const fs::path& file, std::size_t line, const std::string& what) {
  throw FormatError(file.filename().string() + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::int64_t> parse_ints(const fs::path& file, const Line& line) {
  std::vector<std::int64_t> out;
  const char* p = line.text.data();
  const char* end = p + line.text.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == ',')) ++p;
    if (p == end) break;
    std::int64_t v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc()) {
      // Some TU label files store integral values as "1.0".
      double d = 0.0;
      auto [next_d, ec_d] = std::from_chars(p, end, d);
      if (ec_d != std::errc() || d != static_cast<double>(static_cast<std::int64_t>(d))) {
        format_fail(file, line.number, "expected integer, got '" + line.text + "'");
      }
      v = static_cast<std::int64_t>(d);
      next = next_d;
    }
    out.push_back(v);
    p = next;
  }
  return out;
}

std::int64_t parse_single(const fs::path& file, const Line& line) {
  auto v = parse_ints(file, line);
  if (v.size() != 1) format_fail(file, line.number, "expected one value");
  return v[0];
}

fs::path require_file(const fs::path& dir, const std::string& name, const char* suffix) {
  fs::path p = dir / (name + suffix);
  if (!fs::exists(p)) throw LoadError("missing mandatory file " + p.string());
  return p;
}

}  // namespace

Dataset load_tu_dataset(const fs::path& directory) {
  if (!fs::is_directory(directory)) throw LoadError("not a directory: " + directory.string());
  fs::path dir = fs::absolute(directory).lexically_normal();
  std::string name = dir.filename().string();
  if (name.empty()) name = dir.parent_path().filename().string();

  const fs::path a_file = require_file(dir, name, "_A.txt");
  const fs::path ind_file = require_file(dir, name, "_graph_indicator.txt");
  const fs::path lab_file = require_file(dir, name, "_graph_labels.txt");
  const fs::path node_lab_file = dir / (name + "_node_labels.txt");

  // Node -> graph assignment.
  std::vector<int> node_graph;
  for (const Line& line : read_lines(ind_file)) {
    const std::int64_t g = parse_single(ind_file, line);
    if (g < 1) format_fail(ind_file, line.number, "graph id must be >= 1");
    node_graph.push_back(static_cast<int>(g - 1));
  }
  if (node_graph.empty()) throw FormatError(ind_file.filename().string() + ": no nodes");
  const int num_graphs = *std::max_element(node_graph.begin(), node_graph.end()) + 1;

  std::vector<int> local_index(node_graph.size());
  std::vector<int> graph_sizes(num_graphs, 0);
  for (std::size_t i = 0; i < node_graph.size(); ++i) local_index[i] = graph_sizes[node_graph[i]]++;
  for (int g = 0; g < num_graphs; ++g) {
    if (graph_sizes[g] == 0) {
      throw FormatError(ind_file.filename().string() + ": graph " + std::to_string(g + 1) +
                        " has no nodes");
    }
  }

  // Graph labels, remapped to contiguous classes.
  std::vector<std::int64_t> raw_labels;
  for (const Line& line : read_lines(lab_file)) raw_labels.push_back(parse_single(lab_file, line));
  if (raw_labels.size() != static_cast<std::size_t>(num_graphs)) {
    throw FormatError(lab_file.filename().string() + ": " + std::to_string(raw_labels.size()) +
                      " labels for " + std::to_string(num_graphs) + " graphs");
  }
  std::set<std::int64_t> label_set(raw_labels.begin(), raw_labels.end());
  std::vector<std::int64_t> label_values(label_set.begin(), label_set.end());
  std::map<std::int64_t, int> label_index;
  for (std::size_t k = 0; k < label_values.size(); ++k) label_index[label_values[k]] = static_cast<int>(k);

  // Edges, undirected and deduplicated per graph.
  std::vector<std::set<std::pair<int, int>>> edge_sets(num_graphs);
  const auto n_total = static_cast<std::int64_t>(node_graph.size());
  for (const Line& line : read_lines(a_file)) {
    auto v = parse_ints(a_file, line);
    if (v.size() != 2) format_fail(a_file, line.number, "expected 'row, col'");
    if (v[0] < 1 || v[0] > n_total || v[1] < 1 || v[1] > n_total) {
      format_fail(a_file, line.number, "node index outside [1," + std::to_string(n_total) + "]");
    }
    const std::size_t a = static_cast<std::size_t>(v[0] - 1);
    const std::size_t b = static_cast<std::size_t>(v[1] - 1);
    if (node_graph[a] != node_graph[b]) {
      format_fail(a_file, line.number,
                  "edge joins node " + std::to_string(v[0]) + " of graph " +
                      std::to_string(node_graph[a] + 1) + " to node " + std::to_string(v[1]) +
                      " of graph " + std::to_string(node_graph[b] + 1));
    }
    if (a == b) format_fail(a_file, line.number, "self-loop on node " + std::to_string(v[0]));
    int lu = local_index[a];
    int lv = local_index[b];
    if (lu > lv) std::swap(lu, lv);
    edge_sets[node_graph[a]].insert({lu, lv});
  }

  // Node features.
  Dataset ds;
  ds.name = name;
  ds.metadata.source_dir = dir.string();
  ds.metadata.original_labels = label_values;
  ds.num_classes = static_cast<int>(label_values.size());

  std::vector<int> node_feature_index;
  if (fs::exists(node_lab_file)) {
    std::vector<std::int64_t> raw;
    for (const Line& line : read_lines(node_lab_file)) {
      auto v = parse_ints(node_lab_file, line);
      if (v.empty()) format_fail(node_lab_file, line.number, "missing node label");
      raw.push_back(v[0]);
    }
    if (raw.size() != node_graph.size()) {
      throw FormatError(node_lab_file.filename().string() + ": " + std::to_string(raw.size()) +
                        " labels for " + std::to_string(node_graph.size()) + " nodes");
    }
    std::set<std::int64_t> values(raw.begin(), raw.end());
    ds.metadata.node_label_values.assign(values.begin(), values.end());
    ds.metadata.has_node_labels = true;
    node_feature_index.reserve(raw.size());
    for (std::int64_t r : raw) {
      auto it = std::lower_bound(ds.metadata.node_label_values.begin(),
                                 ds.metadata.node_label_values.end(), r);
      node_feature_index.push_back(
          static_cast<int>(it - ds.metadata.node_label_values.begin()));
    }
    ds.feature_dim = ds.metadata.node_label_values.size();
  } else {
    ds.feature_dim = 1;
  }

  std::vector<Tensor> features;
  features.reserve(num_graphs);
  for (int g = 0; g < num_graphs; ++g) features.emplace_back(graph_sizes[g], ds.feature_dim);
  for (std::size_t i = 0; i < node_graph.size(); ++i) {
    const int col = node_feature_index.empty() ? 0 : node_feature_index[i];
    features[node_graph[i]](local_index[i], col) = 1.0;
  }

  ds.graphs.reserve(num_graphs);
  for (int g = 0; g < num_graphs; ++g) {
    std::vector<Edge> edges;
    edges.reserve(edge_sets[g].size());
    for (auto [u, v] : edge_sets[g]) edges.push_back({u, v});
    ds.graphs.emplace_back(graph_sizes[g], std::move(edges), std::move(features[g]),
                           label_index.at(raw_labels[g]));
  }
  validate_dataset(ds);
  return ds;
}

std::string dataset_info_json(const Dataset& dataset) {
  double nodes = 0.0;
  double edges = 0.0;
  std::vector<int> class_counts(dataset.num_classes, 0);
  for (const Graph& g : dataset.graphs) {
    nodes += g.node_count();
    edges += static_cast<double>(g.edge_count());
    if (g.label()) ++class_counts[*g.label()];
  }
  const double n = dataset.graphs.empty() ? 1.0 : static_cast<double>(dataset.graphs.size());
  nlohmann::json j;
  j["name"] = dataset.name;
  j["num_graphs"] = dataset.graphs.size();
  j["num_classes"] = dataset.num_classes;
  j["feature_dim"] = dataset.feature_dim;
  j["mean_nodes"] = nodes / n;
  j["mean_edges"] = edges / n;
  j["class_counts"] = class_counts;
  j["original_labels"] = dataset.metadata.original_labels;
  j["has_node_labels"] = dataset.metadata.has_node_labels;
  j["node_label_values"] = dataset.metadata.node_label_values;
  j["degree_cap"] = dataset.metadata.degree_cap;
  j["source_dir"] = dataset.metadata.source_dir;
  return j.dump(2);
}

}  // namespace lamp

#pragma once

#include <filesystem>
#include <string>

#include "lamp/graph.hpp"

namespace lamp {

/// Loads a dataset in the TU text layout.
///
/// Reads `<name>_A.txt`, `<name>_graph_indicator.txt`, `<name>_graph_labels.txt`
/// and, when present, `<name>_node_labels.txt`, where `<name>` is the directory's
/// base name. Indices are 1-based in the files. Edges are made undirected and
/// deduplicated. Node labels become one-hot features; without them every node
/// gets a single constant feature (see featurize_degrees). Graph labels are
/// remapped to contiguous class indices in ascending raw-value order.
///
/// Throws LoadError for a missing mandatory file, FormatError (with file and
/// line) for malformed content, an edge spanning two graphs, or a self-loop.
Dataset load_tu_dataset(const std::filesystem::path& directory);

/// Dataset statistics and label maps as a JSON object string.
std::string dataset_info_json(const Dataset& dataset);

}  // namespace lamp

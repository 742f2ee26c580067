#include "lamp/param_io.hpp"

#include <map>

#include "json.hpp"
#include "lamp/error.hpp"

namespace lamp {

namespace {
using nlohmann::json;
}

std::string serialize_parameters(std::span<const Parameter* const> params) {
  json arr = json::array();
  for (const Parameter* p : params) {
    json e;
    e["name"] = p->name;
    e["shape"] = {p->value.rows(), p->value.cols()};
    e["values"] = std::vector<double>(p->value.values().begin(), p->value.values().end());
    arr.push_back(std::move(e));
  }
  return arr.dump();
}

void deserialize_parameters(std::string_view text, std::span<Parameter* const> params) {
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("parameter block is not valid JSON: ") + e.what());
  }
  if (!arr.is_array()) throw CheckpointError("parameter block must be a JSON array");

  std::map<std::string, Tensor> loaded;
  try {
    for (const json& e : arr) {
      const auto name = e.at("name").get<std::string>();
      const auto shape = e.at("shape").get<std::vector<std::size_t>>();
      if (shape.size() != 2) throw CheckpointError("parameter " + name + ": shape must have 2 dims");
      auto values = e.at("values").get<std::vector<double>>();
      if (values.size() != shape[0] * shape[1]) {
        throw CheckpointError("parameter " + name + ": value count does not match shape");
      }
      loaded.emplace(name, Tensor(shape[0], shape[1], std::move(values)));
    }
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed parameter entry: ") + e.what());
  }

  for (const Parameter* p : params) {
    auto it = loaded.find(p->name);
    if (it == loaded.end()) throw CheckpointError("parameter " + p->name + " missing from checkpoint");
    if (!it->second.same_shape(p->value)) {
      throw CheckpointError("parameter " + p->name + ": checkpoint shape " + shape_string(it->second) +
                            " differs from model shape " + shape_string(p->value));
    }
  }
  for (Parameter* p : params) {
    *p = Parameter(p->name, std::move(loaded.at(p->name)));
  }
}

}  // namespace lamp

#pragma once

#include <span>
#include <string>
#include <string_view>

#include "lamp/autodiff.hpp"

namespace lamp {

/// JSON array of {"name", "shape": [rows, cols], "values": [...]}; doubles
/// are written in shortest round-trip form, so a reload is bit-exact.
std::string serialize_parameters(std::span<const Parameter* const> params);

/// Loads values by name into `params`. Every target must be present with a
/// matching shape; on any mismatch CheckpointError is thrown and no target is modified.
void deserialize_parameters(std::string_view json, std::span<Parameter* const> params);

}  // namespace lamp

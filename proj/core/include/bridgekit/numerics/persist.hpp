#pragma once

#include <filesystem>

#include "bridgekit/numerics/params.hpp"

namespace bridgekit {

// Binary parameter file layout (all integers little-endian):
//   magic "BKPARAM1" | u32 count | count x { u32 name_len | name bytes |
//   u64 rows | u64 cols | rows*cols float64 payload, row-major }
// Layer dimensions live in a JSON manifest written next to it by the owning model.

void save_params(const ParamStore& store, const std::filesystem::path& path);

/// Loads values into an already-built store. Every stored name must exist with
/// the same shape and every store parameter must be present in the file.
void load_params(ParamStore& store, const std::filesystem::path& path);

}  // namespace bridgekit

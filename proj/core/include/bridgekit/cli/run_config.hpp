#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "bridgekit/data/io.hpp"
#include "bridgekit/data/synth.hpp"
#include "bridgekit/eval/pipeline.hpp"

namespace bridgekit {

/// Where a run's data comes from.
struct DatasetSource {
  enum class Kind { None, Synthetic, Files };
  Kind kind = Kind::None;
  SyncConfig synthetic;
  TabularPaths files;
};

/// Fully resolved command configuration.
struct RunConfig {
  DatasetSource dataset;
  Scenario scenario = Scenario::UD;
  double target_train_frac = 0.2;
  /// Seeds dataset generation and splits; model seeds default to seed, seed+1, seed+2.
  std::uint64_t seed = 0;
  bool seeds_explicit = false;
  PipelineConfig pipeline;
  std::vector<double> homophily_grid{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<int> k_values{4, 8, 16, 20};
  std::filesystem::path output = "bridgekit-out";

  void validate() const;
  /// Canonical form written next to every artifact.
  nlohmann::ordered_json to_json() const;
};

/// Parses a nested JSON config. Unknown keys and invalid values raise ConfigError.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies command-line overrides and re-derives dependent defaults.
void apply_overrides(RunConfig& c, std::optional<std::uint64_t> seed, std::optional<std::filesystem::path> out);

}  // namespace bridgekit

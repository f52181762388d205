#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "bridgekit/cli/run_config.hpp"
#include "bridgekit/eval/report.hpp"

namespace bridgekit {

/// File layout of one output directory.
struct StageLayout {
  std::filesystem::path root;

  std::filesystem::path dataset() const { return root / "dataset"; }
  std::filesystem::path akr() const { return root / "akr"; }
  std::filesystem::path knowledge_map() const { return root / "knowledge_map.tsv"; }
  std::filesystem::path graph() const { return root / "graph.tsv"; }
  std::filesystem::path graph_summary() const { return root / "graph_summary.json"; }
  std::filesystem::path gkt() const { return root / "gkt"; }
  std::filesystem::path predictions() const { return root / "predictions.csv"; }
  std::filesystem::path metrics() const { return root / "metrics.json"; }
};

/// The dataset of a run with splits assigned: read from `<out>/dataset` when
/// present, otherwise generated or loaded per the config and written there.
DomainDataset stage_dataset(const RunConfig& c);

/// gen: writes features.csv, labels.txt, domains.txt, edges.tsv, splits.txt
/// and manifest.json under `<out>/dataset`. Requires a synthetic dataset spec.
void cmd_gen(const RunConfig& c);

/// Stage functions over one model seed, reading and writing `dir`.
void stage_train_akr(const RunConfig& c, const DomainDataset& ds, const StageLayout& dir, std::uint64_t seed);
void stage_build_graph(const RunConfig& c, const DomainDataset& ds, const StageLayout& dir, std::uint64_t seed);
void stage_train_gkt(const RunConfig& c, const DomainDataset& ds, const StageLayout& dir, std::uint64_t seed);

/// Single-seed stage commands using the first configured model seed in `<out>`.
void cmd_train_akr(const RunConfig& c);
void cmd_build_graph(const RunConfig& c);
void cmd_train_gkt(const RunConfig& c);

/// Runs every stage for every seed under `<out>/seed_<s>`, the baselines,
/// and writes report.json and report.txt. Returns the report.
ExperimentReport cmd_run(const RunConfig& c);

/// kind: homophily, k, graph-ablation or sim-ablation. Unknown kinds raise ConfigError.
void cmd_sweep(const RunConfig& c, const std::string& kind);

/// Writes `<name>.json` and `<name>.txt` for a report.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir, const std::string& name);

}  // namespace bridgekit

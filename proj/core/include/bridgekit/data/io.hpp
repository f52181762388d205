#pragma once

#include <filesystem>
#include <optional>

#include "bridgekit/data/dataset.hpp"

namespace bridgekit {

/// Paths of the four tabular files describing a dataset.
struct TabularPaths {
  std::filesystem::path features;  // headerless CSV of floats, one row per sample
  std::filesystem::path labels;    // one integer per line, -1 for unlabeled
  std::filesystem::path domains;   // one token per line, S or T
  std::optional<std::filesystem::path> edges;  // "src<TAB>dst", 0-based

  /// features.csv, labels.txt, domains.txt and edges.tsv inside `dir`.
  static TabularPaths in_directory(const std::filesystem::path& dir);
};

/// Reads a dataset; splits come back Unassigned. Errors are DataErrors that
/// name the offending file and 1-based line.
DomainDataset load_tabular(const TabularPaths& paths);

/// Writes all four files (edges.tsv is written even when empty).
void save_tabular(const DomainDataset& ds, const TabularPaths& paths);

/// One split tag per line: train, val, test or unassigned.
void save_splits(const DomainDataset& ds, const std::filesystem::path& path);
void load_splits(DomainDataset& ds, const std::filesystem::path& path);

}  // namespace bridgekit

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bridgekit/eval/metrics.hpp"

namespace bridgekit {

/// One method (or variant) with per-seed values for each named metric.
/// Metric order is insertion order.
struct ReportRow {
  std::string name;
  std::vector<std::pair<std::string, std::vector<double>>> values;

  void add(const std::string& metric, double value);
  void add(const Metrics& m);
  const std::vector<double>& get(const std::string& metric) const;
  double mean(const std::string& metric) const;
  /// Population standard deviation.
  double stddev(const std::string& metric) const;
};

struct ExperimentReport {
  std::string kind;
  std::string scenario;
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  std::vector<ReportRow> rows;
  /// Free-form notes carried into the JSON output.
  nlohmann::ordered_json notes = nlohmann::ordered_json::object();

  ReportRow& row(const std::string& name);
  const ReportRow& row(const std::string& name) const;
};

double mean_of(const std::vector<double>& v);
double population_std(const std::vector<double>& v);

/// Spearman rank correlation with mid-ranks for ties; 0 when either side is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// FNV-1a 64-bit digest rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

nlohmann::ordered_json to_json(const ExperimentReport& report);
/// Metrics named "*edges" hold counts rather than rates.
bool is_count_metric(const std::string& metric);

/// Aligned columns of mean +- std per metric; rates in percent, counts as is.
std::string to_text(const ExperimentReport& report);

}  // namespace bridgekit

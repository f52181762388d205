#include "bridgekit/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "bridgekit/error.hpp"

namespace bridgekit {

void ReportRow::add(const std::string& metric, double value) {
  for (auto& [name, v] : values) {
    if (name == metric) {
      v.push_back(value);
      return;
    }
  }
  values.emplace_back(metric, std::vector<double>{value});
}

void ReportRow::add(const Metrics& m) {
  add("accuracy", m.accuracy);
  add("binary_f1", m.binary_f1);
  add("macro_f1", m.macro_f1);
  add("micro_f1", m.micro_f1);
  add("auc", m.auc);
}

const std::vector<double>& ReportRow::get(const std::string& metric) const {
  for (const auto& [name, v] : values) {
    if (name == metric) return v;
  }
  throw ConfigError("report row '" + name + "' has no metric '" + metric + "'");
}

double ReportRow::mean(const std::string& metric) const { return mean_of(get(metric)); }
double ReportRow::stddev(const std::string& metric) const { return population_std(get(metric)); }

ReportRow& ExperimentReport::row(const std::string& name) {
  for (auto& r : rows) {
    if (r.name == name) return r;
  }
  rows.push_back(ReportRow{name, {}});
  return rows.back();
}

const ReportRow& ExperimentReport::row(const std::string& name) const {
  for (const auto& r : rows) {
    if (r.name == name) return r;
  }
  throw ConfigError("report has no row '" + name + "'");
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

namespace {

std::vector<double> mid_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) r[order[k]] = mid;
    i = j;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("spearman: length mismatch");
  if (x.size() < 2) return 0.0;
  const auto rx = mid_ranks(x);
  const auto ry = mid_ranks(y);
  const double mx = mean_of(rx);
  const double my = mean_of(ry);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::ordered_json to_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["kind"] = report.kind;
  j["scenario"] = report.scenario;
  j["config_hash"] = report.config_hash;
  j["seeds"] = report.seeds;
  auto& rows = j["rows"];
  rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row;
    row["method"] = r.name;
    row["config_hash"] = report.config_hash;
    row["seeds"] = report.seeds;
    auto& metrics = row["metrics"];
    metrics = nlohmann::ordered_json::object();
    for (const auto& [name, v] : r.values) {
      metrics[name] = {{"mean", mean_of(v)}, {"std", population_std(v)}, {"per_seed", v}};
    }
    rows.push_back(std::move(row));
  }
  if (!report.notes.empty()) j["notes"] = report.notes;
  return j;
}

bool is_count_metric(const std::string& metric) {
  return metric.size() >= 5 && metric.compare(metric.size() - 5, 5, "edges") == 0;
}

std::string to_text(const ExperimentReport& report) {
  std::vector<std::string> metric_names;
  for (const auto& r : report.rows) {
    for (const auto& [name, v] : r.values) {
      if (std::find(metric_names.begin(), metric_names.end(), name) == metric_names.end()) metric_names.push_back(name);
    }
  }
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"method"};
  header.insert(header.end(), metric_names.begin(), metric_names.end());
  cells.push_back(header);
  char buf[64];
  for (const auto& r : report.rows) {
    std::vector<std::string> line{r.name};
    for (const auto& m : metric_names) {
      const auto it = std::find_if(r.values.begin(), r.values.end(), [&](const auto& p) { return p.first == m; });
      if (it == r.values.end()) {
        line.emplace_back("-");
      } else {
        const double unit = is_count_metric(m) ? 1.0 : 100.0;
        std::snprintf(buf, sizeof(buf), "%.2f +- %.2f", unit * mean_of(it->second), unit * population_std(it->second));
        line.emplace_back(buf);
      }
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::ostringstream out;
  out << report.kind << "  scenario=" << report.scenario << "  config=" << report.config_hash << "  seeds=";
  for (std::size_t i = 0; i < report.seeds.size(); ++i) out << (i ? "," : "") << report.seeds[i];
  out << '\n';
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      out << line[c];
      if (c + 1 < line.size()) out << std::string(width[c] - line[c].size() + 2, ' ');
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace bridgekit

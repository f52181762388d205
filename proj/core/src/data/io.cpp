#include "bridgekit/data/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bridgekit/error.hpp"

namespace bridgekit {

namespace {

std::string where(const std::filesystem::path& p, std::size_t line) {
  return p.string() + ":" + std::to_string(line);
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open '" + p.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  // A single trailing blank line is a file terminator, not a record.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return std::string(s.substr(b, e - b));
}

double parse_double(const std::string& token, const std::filesystem::path& p, std::size_t line) {
  const std::string t = trim(token);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (t.empty() || ec != std::errc() || ptr != end) {
    throw DataError(where(p, line) + ": non-numeric feature value '" + t + "'");
  }
  return value;
}

int parse_int(const std::string& token, const std::filesystem::path& p, std::size_t line, const char* what) {
  const std::string t = trim(token);
  int value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw DataError(where(p, line) + ": invalid " + std::string(what) + " '" + t + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

TabularPaths TabularPaths::in_directory(const std::filesystem::path& dir) {
  return TabularPaths{dir / "features.csv", dir / "labels.txt", dir / "domains.txt", dir / "edges.tsv"};
}

DomainDataset load_tabular(const TabularPaths& paths) {
  DomainDataset ds;
  const auto feature_lines = read_lines(paths.features);
  if (feature_lines.empty()) throw DataError(paths.features.string() + ": no rows");
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  for (std::size_t i = 0; i < feature_lines.size(); ++i) {
    std::vector<double> row;
    std::stringstream ss(feature_lines[i]);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_double(cell, paths.features, i + 1));
    if (row.empty()) throw DataError(where(paths.features, i + 1) + ": empty row");
    if (i == 0) width = row.size();
    if (row.size() != width) {
      throw DataError(where(paths.features, i + 1) + ": expected " + std::to_string(width) + " columns, found " +
                      std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < width; ++k) ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  require_finite(ds.features, paths.features.string());

  const auto label_lines = read_lines(paths.labels);
  if (label_lines.size() != n) {
    throw DataError(paths.labels.string() + ": row-count mismatch (" + std::to_string(label_lines.size()) +
                    " labels for " + std::to_string(n) + " feature rows)");
  }
  int max_label = -1;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = parse_int(label_lines[i], paths.labels, i + 1, "label");
    if (y < kUnlabeled) throw DataError(where(paths.labels, i + 1) + ": label out of range (" + std::to_string(y) + ")");
    ds.labels.push_back(y);
    max_label = std::max(max_label, y);
  }
  ds.n_classes = max_label + 1;
  if (ds.n_classes <= 0) throw DataError(paths.labels.string() + ": no labeled samples");

  const auto domain_lines = read_lines(paths.domains);
  if (domain_lines.size() != n) {
    throw DataError(paths.domains.string() + ": row-count mismatch (" + std::to_string(domain_lines.size()) +
                    " domain tags for " + std::to_string(n) + " feature rows)");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::string t = trim(domain_lines[i]);
    if (t == "S") ds.domain.push_back(Domain::Source);
    else if (t == "T") ds.domain.push_back(Domain::Target);
    else throw DataError(where(paths.domains, i + 1) + ": domain tag must be S or T, found '" + t + "'");
    if (ds.domain.back() == Domain::Source && ds.labels[i] == kUnlabeled) {
      throw DataError(where(paths.labels, i + 1) + ": source sample is unlabeled");
    }
  }

  if (paths.edges && std::filesystem::exists(*paths.edges)) {
    const auto edge_lines = read_lines(*paths.edges);
    for (std::size_t i = 0; i < edge_lines.size(); ++i) {
      if (trim(edge_lines[i]).empty()) continue;
      const auto tab = edge_lines[i].find('\t');
      if (tab == std::string::npos) throw DataError(where(*paths.edges, i + 1) + ": expected 'src<TAB>dst'");
      const int a = parse_int(edge_lines[i].substr(0, tab), *paths.edges, i + 1, "node index");
      const int b = parse_int(edge_lines[i].substr(tab + 1), *paths.edges, i + 1, "node index");
      if (a < 0 || b < 0 || a >= static_cast<int>(n) || b >= static_cast<int>(n)) {
        throw DataError(where(*paths.edges, i + 1) + ": dangling edge (" + std::to_string(a) + ", " +
                        std::to_string(b) + ") for " + std::to_string(n) + " nodes");
      }
      if (a == b) throw DataError(where(*paths.edges, i + 1) + ": self-loop on node " + std::to_string(a));
      ds.edges.emplace_back(a, b);
    }
  } else if (paths.edges) {
    throw DataError("cannot open '" + paths.edges->string() + "'");
  }
  ds.split.assign(n, Split::Unassigned);
  ds.validate();
  return ds;
}

void save_tabular(const DomainDataset& ds, const TabularPaths& paths) {
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw DataError("cannot open '" + p.string() + "' for writing");
    return out;
  };
  {
    auto out = open(paths.features);
    for (Eigen::Index i = 0; i < ds.features.rows(); ++i) {
      for (Eigen::Index k = 0; k < ds.features.cols(); ++k) {
        if (k) out << ',';
        out << format_double(ds.features(i, k));
      }
      out << '\n';
    }
  }
  {
    auto out = open(paths.labels);
    for (int y : ds.labels) out << y << '\n';
  }
  {
    auto out = open(paths.domains);
    for (Domain d : ds.domain) out << (d == Domain::Source ? "S" : "T") << '\n';
  }
  if (paths.edges) {
    auto out = open(*paths.edges);
    for (const auto& [a, b] : ds.edges) out << a << '\t' << b << '\n';
  }
}

void save_splits(const DomainDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  for (Split s : ds.split) out << to_string(s) << '\n';
}

void load_splits(DomainDataset& ds, const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (static_cast<int>(lines.size()) != ds.size()) {
    throw DataError(path.string() + ": row-count mismatch (" + std::to_string(lines.size()) + " splits for " +
                    std::to_string(ds.size()) + " samples)");
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      ds.split[i] = parse_split(trim(lines[i]));
    } catch (const DataError&) {
      throw DataError(where(path, i + 1) + ": unknown split tag '" + lines[i] + "'");
    }
  }
}

}  // namespace bridgekit

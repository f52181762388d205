#include "bridgekit/gkt/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bridgekit/error.hpp"
#include "bridgekit/numerics/persist.hpp"

namespace bridgekit {

Aggregation parse_aggregation(const std::string& name) {
  if (name == "mean") return Aggregation::Mean;
  if (name == "gcn") return Aggregation::GcnNormalized;
  throw ConfigError("unknown aggregation '" + name + "' (expected mean or gcn)");
}

std::string to_string(Aggregation a) { return a == Aggregation::Mean ? "mean" : "gcn"; }

Combine parse_combine(const std::string& name) {
  if (name == "concat") return Combine::Concat;
  if (name == "sum") return Combine::Sum;
  if (name == "aggregate") return Combine::AggregateOnly;
  throw ConfigError("unknown combine '" + name + "' (expected concat, sum or aggregate)");
}

std::string to_string(Combine c) {
  switch (c) {
    case Combine::Concat: return "concat";
    case Combine::Sum: return "sum";
    case Combine::AggregateOnly: return "aggregate";
  }
  return "concat";
}

void GnnConfig::validate() const {
  if (layers < 1) throw ConfigError("gkt: at least one message-passing layer is required");
  if (hidden < 1) throw ConfigError("gkt: hidden width must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("gkt: dropout must lie in [0, 1)");
}

std::shared_ptr<const SparseMatrix> aggregation_matrix(const BridgedGraph& g, Aggregation kind) {
  const int n = g.n_nodes;
  std::vector<int> d_in(static_cast<std::size_t>(n), 0);
  std::vector<int> d_out(static_cast<std::size_t>(n), 0);
  for (const auto& e : g.edges) {
    ++d_in[static_cast<std::size_t>(e.dst)];
    ++d_out[static_cast<std::size_t>(e.src)];
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(g.edges.size() + static_cast<std::size_t>(n));
  if (kind == Aggregation::Mean) {
    for (const auto& e : g.edges) triplets.emplace_back(e.dst, e.src, 1.0 / d_in[static_cast<std::size_t>(e.dst)]);
  } else {
    auto w = [&](int i, int j) {
      return 1.0 / (std::sqrt(d_in[static_cast<std::size_t>(i)] + 1.0) * std::sqrt(d_out[static_cast<std::size_t>(j)] + 1.0));
    };
    for (const auto& e : g.edges) triplets.emplace_back(e.dst, e.src, w(e.dst, e.src));
    for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, w(i, i));
  }
  auto adj = std::make_shared<SparseMatrix>(n, n);
  adj->setFromTriplets(triplets.begin(), triplets.end());
  return adj;
}

GnnModel::GnnModel(const GnnConfig& config, int input_dim, int n_classes, std::uint64_t seed)
    : config_(config), input_dim_(input_dim), n_classes_(n_classes), seed_(seed) {
  config_.validate();
  if (input_dim < 1) throw ConfigError("gkt: input dimension must be positive");
  if (n_classes < 2) throw ConfigError("gkt: at least two classes are required");
  Rng rng = make_rng(seed, 0x6e7);
  int in = input_dim;
  for (int l = 0; l < config_.layers; ++l) {
    const int fan_in = config_.combine == Combine::Concat ? 2 * in : in;
    layers_.emplace_back(params_, "layer" + std::to_string(l), fan_in, config_.hidden, rng);
    in = config_.hidden;
  }
  head_ = Linear(params_, "head", in, n_classes, rng);
}

Var GnnModel::forward(Tape& tape, const std::shared_ptr<const SparseMatrix>& adj, Var x, Rng* rng) const {
  if (x.cols() != input_dim_) {
    throw ConfigError("gkt: feature width " + std::to_string(x.cols()) + " does not match the model (" +
                      std::to_string(input_dim_) + ")");
  }
  if (adj->rows() != x.rows()) throw ConfigError("gkt: graph size does not match the feature rows");
  Var h = x;
  for (const auto& layer : layers_) {
    Var agg = spmm(adj, h);
    Var merged;
    switch (config_.combine) {
      case Combine::Concat: merged = concat_cols(h, agg); break;
      case Combine::Sum: merged = add(h, agg); break;
      case Combine::AggregateOnly: merged = agg; break;
    }
    h = dropout(activate(layer.forward(tape, merged), config_.activation), config_.dropout, rng);
  }
  return head_.forward(tape, h);
}

void GnnModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  save_params(params_, dir / "gkt_params.bin");
  nlohmann::ordered_json j;
  j["kind"] = "gkt";
  j["input_dim"] = input_dim_;
  j["n_classes"] = n_classes_;
  j["seed"] = seed_;
  j["layers"] = config_.layers;
  j["hidden"] = config_.hidden;
  j["aggregation"] = to_string(config_.aggregation);
  j["combine"] = to_string(config_.combine);
  j["activation"] = to_string(config_.activation);
  j["dropout"] = config_.dropout;
  std::ofstream out(dir / "gkt_manifest.json", std::ios::trunc);
  if (!out) throw DataError("cannot write '" + (dir / "gkt_manifest.json").string() + "'");
  out << j.dump(2) << '\n';
}

GnnModel GnnModel::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "gkt_manifest.json");
  if (!in) throw DataError("missing GKT model manifest '" + (dir / "gkt_manifest.json").string() + "'");
  try {
    nlohmann::json j;
    in >> j;
    GnnConfig c;
    c.layers = j.at("layers");
    c.hidden = j.at("hidden");
    c.aggregation = parse_aggregation(j.at("aggregation"));
    c.combine = parse_combine(j.at("combine"));
    c.activation = parse_activation(j.at("activation"));
    c.dropout = j.at("dropout");
    GnnModel model(c, j.at("input_dim"), j.at("n_classes"), j.at("seed").get<std::uint64_t>());
    load_params(model.params_, dir / "gkt_params.bin");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed GKT manifest: " + std::string(e.what()));
  }
}

Matrix gnn_forward(const GnnModel& model, const BridgedGraph& g) {
  Tape tape;
  const auto adj = aggregation_matrix(g, model.config().aggregation);
  return model.forward(tape, adj, tape.constant(g.features), nullptr).value();
}

Predictions predict_from_logits(const Matrix& logits) {
  Predictions p;
  p.label.resize(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < logits.cols(); ++c) {
      if (logits(i, c) > logits(i, best)) best = c;
    }
    p.label[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  p.scores = softmax_rows(logits);
  return p;
}

Predictions predict(const GnnModel& model, const BridgedGraph& g) { return predict_from_logits(gnn_forward(model, g)); }

void save_predictions(const Predictions& p, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << "node,pred";
  for (Eigen::Index c = 0; c < p.scores.cols(); ++c) out << ",score_" << c;
  out << '\n';
  char buf[40];
  for (std::size_t i = 0; i < p.label.size(); ++i) {
    out << i << ',' << p.label[i];
    for (Eigen::Index c = 0; c < p.scores.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", p.scores(static_cast<Eigen::Index>(i), c));
      out << ',' << buf;
    }
    out << '\n';
  }
}

Predictions load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open predictions '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty predictions file");
  const auto n_cols = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',')) - 1;
  std::vector<std::vector<double>> rows;
  Predictions p;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<Eigen::Index>(cells.size()) != n_cols + 2) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": wrong column count");
    }
    p.label.push_back(std::stoi(cells[1]));
    std::vector<double> r;
    for (std::size_t c = 2; c < cells.size(); ++c) r.push_back(std::stod(cells[c]));
    rows.push_back(std::move(r));
  }
  p.scores.resize(static_cast<Eigen::Index>(rows.size()), n_cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index c = 0; c < n_cols; ++c) p.scores(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<std::size_t>(c)];
  }
  return p;
}

}  // namespace bridgekit

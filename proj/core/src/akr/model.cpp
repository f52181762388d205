#include "bridgekit/akr/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "bridgekit/error.hpp"
#include "bridgekit/numerics/persist.hpp"
#include "bridgekit/rng.hpp"

namespace bridgekit {

namespace {

/// Mean of intra-domain neighbor features, rows in `members` order.
Matrix neighbor_mean(const DomainDataset& ds, const std::vector<int>& members) {
  std::vector<int> local(static_cast<std::size_t>(ds.size()), -1);
  for (std::size_t k = 0; k < members.size(); ++k) local[static_cast<std::size_t>(members[k])] = static_cast<int>(k);
  Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(members.size()), ds.dim());
  std::vector<int> degree(members.size(), 0);
  for (const auto& [a, b] : ds.edges) {
    const int la = local[static_cast<std::size_t>(a)];
    const int lb = local[static_cast<std::size_t>(b)];
    if (la < 0 || lb < 0) continue;
    sum.row(la) += ds.features.row(b);
    sum.row(lb) += ds.features.row(a);
    ++degree[static_cast<std::size_t>(la)];
    ++degree[static_cast<std::size_t>(lb)];
  }
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (degree[k] > 0) sum.row(static_cast<Eigen::Index>(k)) /= degree[k];
  }
  return sum;
}

Matrix encoder_input(const DomainDataset& ds, const std::vector<int>& members, bool graph) {
  Matrix x = take_rows(ds.features, members);
  if (!graph) return x;
  Matrix out(x.rows(), 2 * x.cols());
  out << x, neighbor_mean(ds, members);
  return out;
}

}  // namespace

Pooling parse_pooling(const std::string& name) {
  if (name == "sum") return Pooling::Sum;
  if (name == "mean") return Pooling::Mean;
  throw ConfigError("unknown pooling '" + name + "' (expected sum or mean)");
}

std::string to_string(Pooling p) { return p == Pooling::Sum ? "sum" : "mean"; }

void AkrConfig::validate() const {
  if (hidden <= 0 || embed <= 0 || pool_width <= 0 || sim_width <= 0 || decoder_hidden <= 0 || critic_hidden <= 0) {
    throw ConfigError("akr: all widths must be positive");
  }
  if (encoder_layers < 1) throw ConfigError("akr: encoder_layers must be >= 1");
}

AkrInputs AkrInputs::build(const DomainDataset& ds, bool graph_encoder, bool training_pool) {
  AkrInputs in;
  in.source_nodes = ds.nodes(Domain::Source);
  in.target_nodes = ds.nodes(Domain::Target);
  if (in.source_nodes.empty() || in.target_nodes.empty()) throw DataError("akr: both domains must be non-empty");
  in.source_x = encoder_input(ds, in.source_nodes, graph_encoder);
  in.target_x = encoder_input(ds, in.target_nodes, graph_encoder);
  in.target_raw = take_rows(ds.features, in.target_nodes);
  in.row_of_node.assign(static_cast<std::size_t>(ds.size()), -1);
  const int ns = static_cast<int>(in.source_nodes.size());
  for (int k = 0; k < ns; ++k) in.row_of_node[static_cast<std::size_t>(in.source_nodes[k])] = k;
  for (int k = 0; k < static_cast<int>(in.target_nodes.size()); ++k) {
    in.row_of_node[static_cast<std::size_t>(in.target_nodes[k])] = ns + k;
  }
  for (int k = 0; k < ns; ++k) {
    if (!training_pool || ds.split[in.source_nodes[k]] == Split::Train) in.source_pool.push_back(k);
  }
  for (int k = 0; k < static_cast<int>(in.target_nodes.size()); ++k) {
    if (!training_pool || ds.split[in.target_nodes[k]] == Split::Train) in.target_pool.push_back(k);
  }
  if (in.source_pool.empty() || in.target_pool.empty()) throw DataError("akr: empty pooling set (are splits assigned?)");
  return in;
}

AkrModel::AkrModel(const AkrConfig& config, int input_dim, std::uint64_t seed)
    : config_(config), input_dim_(input_dim), seed_(seed) {
  config_.validate();
  if (input_dim <= 0) throw ConfigError("akr: input dimension must be positive");
  Rng rng = make_rng(seed, 0xa4b);
  const int enc_in = config_.graph_encoder ? 2 * input_dim : input_dim;
  std::vector<int> enc_dims{enc_in};
  for (int l = 0; l + 1 < config_.encoder_layers; ++l) enc_dims.push_back(config_.hidden);
  enc_dims.push_back(config_.embed);
  const int h = config_.embed;
  const int p = config_.pool_width;
  source_encoder_ = Mlp(params_, "enc_src", enc_dims, config_.activation, rng);
  target_encoder_ = Mlp(params_, "enc_tgt", enc_dims, config_.activation, rng);
  pool_src_ = &params_.add("div.pool_src", glorot_uniform(h, p, rng));
  pool_tgt_ = &params_.add("div.pool_tgt", glorot_uniform(h, p, rng));
  divergence_ = &params_.add("div.transform", glorot_uniform(p + h, h, rng));
  decoder_ = Mlp(params_, "dec", {h, config_.decoder_hidden, input_dim}, config_.activation, rng);
  critic_hidden_ = Linear(params_, "critic.0", h, config_.critic_hidden, rng);
  critic_out_ = Linear(params_, "critic.1", config_.critic_hidden, 1, rng);
  critic_w1_ = &params_.get("critic.0.weight");
  critic_w2_ = &params_.get("critic.1.weight");
  sim_proj_ = &params_.add("sim.proj", glorot_uniform(h, config_.sim_width, rng));
}

AkrModel::Forward AkrModel::forward(Tape& tape, const AkrInputs& in) const {
  Forward f;
  f.source_h = source_encoder_.forward(tape, tape.constant(in.source_x));
  f.target_h = target_encoder_.forward(tape, tape.constant(in.target_x));
  Var src_summary = matmul(gather_rows(f.source_h, in.source_pool), tape.param(*pool_src_));
  Var tgt_summary = matmul(gather_rows(f.target_h, in.target_pool), tape.param(*pool_tgt_));
  Var delta = config_.pooling == Pooling::Sum ? sub(sum_rows(src_summary), sum_rows(tgt_summary))
                                              : sub(mean_rows(src_summary), mean_rows(tgt_summary));
  Var joined = concat_cols(broadcast_rows(delta, f.target_h.rows()), f.target_h);
  f.target_delta = matmul(joined, tape.param(*divergence_));
  f.target_tilde = add(f.target_h, f.target_delta);
  f.stacked = concat_rows(f.source_h, f.target_tilde);
  return f;
}

Var AkrModel::critic(Tape& tape, Var h) const {
  return critic_out_.forward(tape, activate(critic_hidden_.forward(tape, h), config_.activation));
}

Var AkrModel::critic_gradient_penalty(Tape& tape, Var h) const {
  if (config_.activation == Activation::Tanh) throw ConfigError("gradient penalty requires a relu or identity critic");
  Var pre = critic_hidden_.forward(tape, h);
  Matrix mask = config_.activation == Activation::Relu ? Matrix((pre.value().array() > 0.0).cast<double>())
                                                       : Matrix::Ones(pre.rows(), pre.cols());
  Var w1 = tape.param(*critic_w1_);
  Var w2 = tape.param(*critic_w2_);
  // Row i of the input gradient: (mask_i .* w2^T) * w1^T.
  Var scaled = hadamard(tape.constant(std::move(mask)), broadcast_rows(transpose(w2), h.rows()));
  Var grad = matmul(scaled, transpose(w1));
  Var sq = sum_rows(transpose(hadamard(grad, grad)));  // 1 x N squared norms
  const Matrix& sq_v = sq.value();
  Matrix norms(1, sq_v.cols());
  for (Eigen::Index i = 0; i < sq_v.cols(); ++i) norms(0, i) = std::sqrt(std::max(sq_v(0, i), 1e-24));
  // d||g||/d(sq) = 1 / (2 ||g||); recorded as an op so the penalty stays differentiable.
  Var norm = tape.record(norms, "sqrt", {sq}, [sq, norms](Tape& t, const Matrix& g) {
    t.accumulate(sq, Matrix(g.array() / (2.0 * norms.array())));
  });
  Var centered = sub(norm, tape.constant(Matrix::Ones(1, norms.cols())));
  return mean_all(hadamard(centered, centered));
}

Var AkrModel::decode(Tape& tape, Var h) const { return decoder_.forward(tape, h); }

Var AkrModel::project(Tape& tape, Var stacked) const { return matmul(stacked, tape.param(*sim_proj_)); }

std::vector<Parameter*> AkrModel::critic_params() { return params_.with_prefix("critic."); }

std::vector<Parameter*> AkrModel::generator_params() { return params_.without_prefix("critic."); }

void AkrModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  save_params(params_, dir / "akr_params.bin");
  nlohmann::ordered_json j;
  j["kind"] = "akr";
  j["input_dim"] = input_dim_;
  j["seed"] = seed_;
  j["hidden"] = config_.hidden;
  j["embed"] = config_.embed;
  j["encoder_layers"] = config_.encoder_layers;
  j["pool_width"] = config_.pool_width;
  j["sim_width"] = config_.sim_width;
  j["decoder_hidden"] = config_.decoder_hidden;
  j["critic_hidden"] = config_.critic_hidden;
  j["activation"] = to_string(config_.activation);
  j["graph_encoder"] = config_.graph_encoder;
  j["pooling"] = to_string(config_.pooling);
  auto& layers = j["parameters"];
  layers = nlohmann::ordered_json::array();
  for (const Parameter* p : params_.all()) {
    layers.push_back({{"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}});
  }
  std::ofstream out(dir / "akr_manifest.json", std::ios::trunc);
  if (!out) throw DataError("cannot write '" + (dir / "akr_manifest.json").string() + "'");
  out << j.dump(2) << '\n';
}

AkrModel AkrModel::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "akr_manifest.json");
  if (!in) throw DataError("missing AKR model manifest '" + (dir / "akr_manifest.json").string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed AKR manifest: " + std::string(e.what()));
  }
  AkrConfig c;
  c.hidden = j.at("hidden");
  c.embed = j.at("embed");
  c.encoder_layers = j.at("encoder_layers");
  c.pool_width = j.at("pool_width");
  c.sim_width = j.at("sim_width");
  c.decoder_hidden = j.at("decoder_hidden");
  c.critic_hidden = j.at("critic_hidden");
  c.activation = parse_activation(j.at("activation"));
  c.graph_encoder = j.at("graph_encoder");
  c.pooling = parse_pooling(j.at("pooling"));
  AkrModel model(c, j.at("input_dim"), j.at("seed").get<std::uint64_t>());
  load_params(model.params_, dir / "akr_params.bin");
  return model;
}

AkrState encode(const AkrModel& model, const DomainDataset& ds) {
  const AkrInputs in = AkrInputs::build(ds, model.config().graph_encoder, /*training_pool=*/false);
  Tape tape;
  auto f = model.forward(tape, in);
  Var proj = model.project(tape, f.stacked);
  AkrState s;
  s.source_h = f.source_h.value();
  s.target_h = f.target_h.value();
  s.target_delta = f.target_delta.value();
  s.target_tilde = f.target_tilde.value();
  s.stacked = f.stacked.value();
  s.projected = proj.value();
  s.row_of_node = in.row_of_node;
  s.node_of_row.reserve(in.source_nodes.size() + in.target_nodes.size());
  s.node_of_row.insert(s.node_of_row.end(), in.source_nodes.begin(), in.source_nodes.end());
  s.node_of_row.insert(s.node_of_row.end(), in.target_nodes.begin(), in.target_nodes.end());
  return s;
}

double similarity(const AkrState& state, int i, int j) {
  const auto n = static_cast<int>(state.row_of_node.size());
  if (i < 0 || j < 0 || i >= n || j >= n) throw ConfigError("similarity: node index out of range");
  const auto a = state.projected.row(state.row_of_node[static_cast<std::size_t>(i)]);
  const auto b = state.projected.row(state.row_of_node[static_cast<std::size_t>(j)]);
  const double na = a.norm();
  const double nb = b.norm();
  if (na < 1e-12 || nb < 1e-12) return 0.0;
  return a.dot(b) / (na * nb);
}

CosineSimilarity similarity_index(const AkrState& state) {
  Matrix by_node(state.projected.rows(), state.projected.cols());
  for (std::size_t node = 0; node < state.row_of_node.size(); ++node) {
    by_node.row(static_cast<Eigen::Index>(node)) = state.projected.row(state.row_of_node[node]);
  }
  return CosineSimilarity(by_node);
}

}  // namespace bridgekit

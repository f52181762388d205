#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "bridgekit/akr/similarity.hpp"
#include "bridgekit/data/dataset.hpp"
#include "bridgekit/numerics/layers.hpp"
#include "bridgekit/numerics/params.hpp"
#include "bridgekit/numerics/tape.hpp"

namespace bridgekit {

enum class Pooling { Sum, Mean };

Pooling parse_pooling(const std::string& name);
std::string to_string(Pooling p);

/// Architecture of the retrieval model.
struct AkrConfig {
  int hidden = 64;          // encoder hidden width
  int embed = 64;           // encoder output width H, shared by both encoders
  int encoder_layers = 3;   // linear layers per encoder
  int pool_width = 64;      // P, width of the pooled domain summaries
  int sim_width = 64;       // width of the similarity projection
  int decoder_hidden = 64;
  int critic_hidden = 64;
  Activation activation = Activation::Relu;
  /// Prepend a mean-aggregation layer over original intra-domain edges.
  bool graph_encoder = false;
  // Sum pooling scales with the pool size; mean keeps the summaries on the
  // scale of one representation.
  Pooling pooling = Pooling::Mean;

  void validate() const;
};

/// Dataset-derived tensors the model consumes. Source rows come first in the
/// stacked index space, then target rows, each in ascending node id order.
struct AkrInputs {
  std::vector<int> source_nodes;
  std::vector<int> target_nodes;
  Matrix source_x;  // encoder inputs (features, or [x | neighbor mean] for graph encoders)
  Matrix target_x;
  Matrix target_raw;  // reconstruction target
  std::vector<int> source_pool;  // local row ids pooled into the domain summary
  std::vector<int> target_pool;
  std::vector<int> row_of_node;  // node id -> stacked row

  /// `training_pool`: pool over labeled Train rows; otherwise over all rows.
  static AkrInputs build(const DomainDataset& ds, bool graph_encoder, bool training_pool);
};

/// Values of one forward pass, in the stacked index space.
struct AkrState {
  Matrix source_h;       // N^S x H
  Matrix target_h;       // N^T x H
  Matrix target_delta;   // N^T x H
  Matrix target_tilde;   // N^T x H, target_h + target_delta
  Matrix stacked;        // N x H, [source_h; target_tilde]
  Matrix projected;      // N x H_sim, stacked * W_sim
  std::vector<int> row_of_node;
  std::vector<int> node_of_row;
};

/// Source/target encoders, domain-divergence transform, target decoder,
/// critic and cosine similarity projection. Parameter names are prefixed by
/// component: "enc_src.", "enc_tgt.", "div.", "dec.", "critic.", "sim.".
class AkrModel {
 public:
  AkrModel(const AkrConfig& config, int input_dim, std::uint64_t seed);

  struct Forward {
    Var source_h;
    Var target_h;
    Var target_delta;
    Var target_tilde;
    Var stacked;
  };

  Forward forward(Tape& tape, const AkrInputs& inputs) const;
  /// Critic score per row (no squashing), N x 1.
  Var critic(Tape& tape, Var h) const;
  Var decode(Tape& tape, Var h) const;
  Var project(Tape& tape, Var stacked) const;

  /// Penalty mean((||grad_h D(h)|| - 1)^2) at the given rows. The critic has
  /// one hidden layer, so the input gradient is (mask * w2^T) w1^T with the
  /// activation mask held fixed, which is exact almost everywhere.
  Var critic_gradient_penalty(Tape& tape, Var h) const;

  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  std::vector<Parameter*> critic_params();
  std::vector<Parameter*> generator_params();

  const AkrConfig& config() const { return config_; }
  int input_dim() const { return input_dim_; }

  /// Writes akr_params.bin and akr_manifest.json into `dir`.
  void save(const std::filesystem::path& dir) const;
  static AkrModel load(const std::filesystem::path& dir);

 private:
  AkrConfig config_;
  int input_dim_ = 0;
  std::uint64_t seed_ = 0;
  ParamStore params_;
  Mlp source_encoder_;
  Mlp target_encoder_;
  Parameter* pool_src_ = nullptr;  // H x P
  Parameter* pool_tgt_ = nullptr;  // H x P
  Parameter* divergence_ = nullptr;  // (P + H) x H
  Mlp decoder_;
  Linear critic_hidden_;
  Linear critic_out_;
  Parameter* critic_w1_ = nullptr;
  Parameter* critic_w2_ = nullptr;
  Parameter* sim_proj_ = nullptr;  // H x H_sim
};

/// Inference pass: pools over every row of each domain.
AkrState encode(const AkrModel& model, const DomainDataset& ds);

/// Cosine of the projected rows of nodes i and j; 0 when either norm < 1e-12.
double similarity(const AkrState& state, int i, int j);

/// Similarity over node ids backed by the projected representations.
CosineSimilarity similarity_index(const AkrState& state);

}  // namespace bridgekit

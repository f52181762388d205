#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "bridgekit/graph/bridged_graph.hpp"
#include "bridgekit/numerics/layers.hpp"
#include "bridgekit/numerics/params.hpp"
#include "bridgekit/numerics/tape.hpp"

namespace bridgekit {

enum class Aggregation { Mean, GcnNormalized };

/// How a layer merges a node's own state with its aggregate. `AggregateOnly`
/// discards the self term, which together with gcn-normalized aggregation
/// (self-loop included) gives the classic GCN layer.
enum class Combine { Concat, Sum, AggregateOnly };

Aggregation parse_aggregation(const std::string& name);
std::string to_string(Aggregation a);
Combine parse_combine(const std::string& name);
std::string to_string(Combine c);

struct GnnConfig {
  int layers = 2;
  int hidden = 64;
  Aggregation aggregation = Aggregation::Mean;
  Combine combine = Combine::Concat;
  Activation activation = Activation::Relu;
  double dropout = 0.5;

  void validate() const;
};

/// Sparse N x N aggregation matrix: row i holds the weights of i's in-neighbors.
/// Mean: 1 / d_in(i) per in-neighbor (empty rows aggregate to zero).
/// GcnNormalized: 1 / (sqrt(d_in(i) + 1) sqrt(d_out(j) + 1)) over in-neighbors
/// j plus a self-loop.
std::shared_ptr<const SparseMatrix> aggregation_matrix(const BridgedGraph& g, Aggregation kind);

/// Message-passing layers followed by a linear classifier head.
class GnnModel {
 public:
  GnnModel(const GnnConfig& config, int input_dim, int n_classes, std::uint64_t seed);

  /// Logits N x C. Dropout is applied to hidden layer outputs when `rng` is set.
  Var forward(Tape& tape, const std::shared_ptr<const SparseMatrix>& adj, Var x, Rng* rng) const;

  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  const GnnConfig& config() const { return config_; }
  int input_dim() const { return input_dim_; }
  int n_classes() const { return n_classes_; }

  /// Writes gkt_params.bin and gkt_manifest.json into `dir`.
  void save(const std::filesystem::path& dir) const;
  static GnnModel load(const std::filesystem::path& dir);

 private:
  GnnConfig config_;
  int input_dim_ = 0;
  int n_classes_ = 0;
  std::uint64_t seed_ = 0;
  ParamStore params_;
  std::vector<Linear> layers_;
  Linear head_;
};

/// Inference logits over every node of the graph.
Matrix gnn_forward(const GnnModel& model, const BridgedGraph& g);

struct Predictions {
  std::vector<int> label;  // argmax, ties to the lower class
  Matrix scores;           // row-wise softmax
};

Predictions predict_from_logits(const Matrix& logits);
Predictions predict(const GnnModel& model, const BridgedGraph& g);

/// CSV "node,pred,score_0..score_{C-1}" with a header row.
void save_predictions(const Predictions& p, const std::filesystem::path& path);
Predictions load_predictions(const std::filesystem::path& path);

}  // namespace bridgekit

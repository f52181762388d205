#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bridgekit/akr/model.hpp"
#include "bridgekit/akr/retrieve.hpp"
#include "bridgekit/akr/train.hpp"
#include "bridgekit/eval/learners.hpp"
#include "bridgekit/eval/report.hpp"
#include "bridgekit/gkt/model.hpp"
#include "bridgekit/gkt/train.hpp"
#include "bridgekit/graph/bridged_graph.hpp"

namespace bridgekit {

/// Hyperparameters of every stage and baseline.
struct PipelineConfig {
  AkrConfig akr;
  AkrTrainConfig akr_train;
  int k = 8;
  double eps_quantile = 0.25;
  GnnConfig gkt;
  FitConfig gkt_fit;
  DnnConfig dnn;
  /// Pairs per held-out evaluation batch (similarity ablation).
  int eval_pairs = 2000;
  std::vector<std::uint64_t> seeds{0, 1, 2};

  void validate() const;
};

/// Defaults per scenario: relational scenarios use a graph encoder in the
/// retrieval model and GCN-style transfer layers.
PipelineConfig default_pipeline_config(Scenario scenario);

nlohmann::ordered_json to_json(const PipelineConfig& c);
/// Parses a (possibly partial) config over `base`; unknown keys raise ConfigError.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j, PipelineConfig base);

/// Digest of the dataset contents and the canonical config JSON.
std::string config_hash(const DomainDataset& ds, const nlohmann::ordered_json& config);

/// Empty report stamped with kind, scenario, config hash and seeds.
ExperimentReport make_report(const std::string& kind, const DomainDataset& ds, Scenario scenario,
                             const PipelineConfig& c);

/// Notes attached to every "run" report.
void finish_run_report(ExperimentReport& report, const DomainDataset& ds, const PipelineConfig& c);

// ---- per-seed stages --------------------------------------------------------

AkrModel train_akr_stage(const DomainDataset& ds, const PipelineConfig& c, std::uint64_t seed,
                         AkrTrainResult* curves = nullptr);

struct RetrievalOutput {
  KnowledgeMap map;
  BridgedGraph graph;
};

/// Retrieval and graph construction from any similarity learner.
RetrievalOutput bridge_stage(const DomainDataset& ds, Scenario scenario, const PairSimilarity& sim, int k,
                             double eps_quantile);

GnnModel train_gkt_stage(const BridgedGraph& g, const GnnConfig& gkt, const FitConfig& fit, std::uint64_t seed,
                         FitCurves* curves = nullptr);

/// Metrics on labeled target Test nodes.
Metrics target_test_metrics(const DomainDataset& ds, const Predictions& p);

/// Original relations as a graph (both directions). `target_only` keeps
/// target-target edges alone.
BridgedGraph original_graph(const DomainDataset& ds, bool target_only);

// ---- experiments ------------------------------------------------------------

/// Bridged-GNN plus DNN baselines (and original-graph GNN baselines for
/// relational scenarios), each over every configured seed.
ExperimentReport run_pipeline(const DomainDataset& ds, Scenario scenario, const PipelineConfig& c);

/// Baseline rows appended to `report` for one seed.
void run_baselines(const DomainDataset& ds, Scenario scenario, const PipelineConfig& c, std::uint64_t seed,
                   ExperimentReport& report);

struct HomophilyPoint {
  double r_intra = 0.0;
  double r_inter = 0.0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
};

/// One row per (r_intra, r_inter, seed), in grid order then seed order.
std::vector<HomophilyPoint> homophily_sweep(const DomainDataset& ds, const std::vector<double>& grid,
                                            const PipelineConfig& c);

/// CSV "r_intra,r_inter,seed,accuracy" with a header row.
std::string homophily_csv(const std::vector<HomophilyPoint>& points);

ExperimentReport graph_ablation(const DomainDataset& ds, const PipelineConfig& c);
ExperimentReport similarity_ablation(const DomainDataset& ds, Scenario scenario, const PipelineConfig& c);
ExperimentReport k_sweep(const DomainDataset& ds, Scenario scenario, const std::vector<int>& ks,
                         const PipelineConfig& c);

}  // namespace bridgekit

#include "bridgekit/eval/pipeline.hpp"

#include <cmath>
#include <sstream>

#include "bridgekit/config_reader.hpp"
#include "bridgekit/error.hpp"
#include "bridgekit/parallel.hpp"

namespace bridgekit {

namespace {

constexpr const char* kBridged = "Bridged-GNN";

void read_fit(ConfigReader& r, FitConfig& f) {
  r.read("epochs", f.epochs);
  r.read("lr", f.lr);
  r.read("weight_decay", f.weight_decay);
  r.read("patience", f.patience);
}

nlohmann::ordered_json fit_json(const FitConfig& f) {
  return {{"epochs", f.epochs}, {"lr", f.lr}, {"weight_decay", f.weight_decay}, {"patience", f.patience}};
}

std::vector<int> labeled_target(const DomainDataset& ds, Split s) {
  std::vector<int> out;
  for (int v : ds.nodes(Domain::Target, s)) {
    if (ds.labels[static_cast<std::size_t>(v)] != kUnlabeled) out.push_back(v);
  }
  return out;
}

void require_splits(const DomainDataset& ds) {
  if (labeled_target(ds, Split::Train).empty()) throw DataError("splits not assigned: no labeled target Train nodes");
  if (labeled_target(ds, Split::Test).empty()) throw DataError("splits not assigned: no labeled target Test nodes");
}

double test_accuracy(const DomainDataset& ds, const Predictions& p) {
  std::vector<int> truth, pred;
  for (int v : labeled_target(ds, Split::Test)) {
    truth.push_back(ds.labels[static_cast<std::size_t>(v)]);
    pred.push_back(p.label[static_cast<std::size_t>(v)]);
  }
  return accuracy(truth, pred);
}

Metrics bridged_run(const DomainDataset& ds, Scenario scenario, const PairSimilarity& sim, int k,
                    const PipelineConfig& c, std::uint64_t seed, int* knn_edges = nullptr) {
  auto out = bridge_stage(ds, scenario, sim, k, c.eps_quantile);
  if (knn_edges) *knn_edges = out.graph.count(EdgeProvenance::Knn);
  const GnnModel model = train_gkt_stage(out.graph, c.gkt, c.gkt_fit, seed);
  return target_test_metrics(ds, predict(model, out.graph));
}

}  // namespace

void PipelineConfig::validate() const {
  akr.validate();
  akr_train.validate();
  if (k < 1) throw ConfigError("retrieval: k must be >= 1");
  if (!(eps_quantile >= 0.0 && eps_quantile <= 1.0)) throw ConfigError("retrieval: eps_quantile must lie in [0, 1]");
  gkt.validate();
  gkt_fit.validate();
  dnn.validate();
  if (eval_pairs < 2) throw ConfigError("eval_pairs must be >= 2");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
}

PipelineConfig default_pipeline_config(Scenario scenario) {
  PipelineConfig c;
  if (scenario != Scenario::UD) {
    c.akr.graph_encoder = true;
    c.gkt.aggregation = Aggregation::GcnNormalized;
    c.gkt.combine = Combine::AggregateOnly;
  }
  return c;
}

nlohmann::ordered_json to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  const auto& a = c.akr;
  const auto& t = c.akr_train;
  j["akr"] = {{"hidden", a.hidden},
              {"embed", a.embed},
              {"encoder_layers", a.encoder_layers},
              {"pool_width", a.pool_width},
              {"sim_width", a.sim_width},
              {"decoder_hidden", a.decoder_hidden},
              {"critic_hidden", a.critic_hidden},
              {"activation", to_string(a.activation)},
              {"graph_encoder", a.graph_encoder},
              {"pooling", to_string(a.pooling)},
              {"epochs", t.epochs},
              {"n_pair", t.n_pair},
              {"lr", t.lr},
              {"weight_decay", t.weight_decay},
              {"critic_steps", t.critic_steps},
              {"clip_c", t.clip_c},
              {"lipschitz", to_string(t.lipschitz)},
              {"gp_weight", t.gp_weight},
              {"max_class_num", t.max_class_num},
              {"pool_labeled", t.pool_labeled}};
  j["retrieval"] = {{"k", c.k}, {"eps_quantile", c.eps_quantile}};
  auto gkt = nlohmann::ordered_json{{"layers", c.gkt.layers},
                                    {"hidden", c.gkt.hidden},
                                    {"aggregation", to_string(c.gkt.aggregation)},
                                    {"combine", to_string(c.gkt.combine)},
                                    {"activation", to_string(c.gkt.activation)},
                                    {"dropout", c.gkt.dropout}};
  gkt.update(fit_json(c.gkt_fit));
  j["gkt"] = gkt;
  auto dnn = nlohmann::ordered_json{{"layers", c.dnn.layers},
                                    {"hidden", c.dnn.hidden},
                                    {"activation", to_string(c.dnn.activation)},
                                    {"dropout", c.dnn.dropout}};
  dnn.update(fit_json(c.dnn.fit));
  j["dnn"] = dnn;
  j["eval_pairs"] = c.eval_pairs;
  j["seeds"] = c.seeds;
  return j;
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& j, PipelineConfig c) {
  ConfigReader root(j, "");
  std::function<Activation(const std::string&)> act = parse_activation;
  if (const auto* s = root.section("akr")) {
    ConfigReader r(*s, "akr");
    r.read("hidden", c.akr.hidden);
    r.read("embed", c.akr.embed);
    r.read("encoder_layers", c.akr.encoder_layers);
    r.read("pool_width", c.akr.pool_width);
    r.read("sim_width", c.akr.sim_width);
    r.read("decoder_hidden", c.akr.decoder_hidden);
    r.read("critic_hidden", c.akr.critic_hidden);
    r.read_enum("activation", c.akr.activation, act);
    r.read("graph_encoder", c.akr.graph_encoder);
    r.read_enum<Pooling>("pooling", c.akr.pooling, parse_pooling);
    r.read("epochs", c.akr_train.epochs);
    r.read("n_pair", c.akr_train.n_pair);
    r.read("lr", c.akr_train.lr);
    r.read("weight_decay", c.akr_train.weight_decay);
    r.read("critic_steps", c.akr_train.critic_steps);
    r.read("clip_c", c.akr_train.clip_c);
    r.read_enum<LipschitzControl>("lipschitz", c.akr_train.lipschitz, parse_lipschitz);
    r.read("gp_weight", c.akr_train.gp_weight);
    r.read("max_class_num", c.akr_train.max_class_num);
    r.read("pool_labeled", c.akr_train.pool_labeled);
    r.finish();
  }
  if (const auto* s = root.section("retrieval")) {
    ConfigReader r(*s, "retrieval");
    r.read("k", c.k);
    r.read("eps_quantile", c.eps_quantile);
    r.finish();
  }
  if (const auto* s = root.section("gkt")) {
    ConfigReader r(*s, "gkt");
    r.read("layers", c.gkt.layers);
    r.read("hidden", c.gkt.hidden);
    r.read_enum<Aggregation>("aggregation", c.gkt.aggregation, parse_aggregation);
    r.read_enum<Combine>("combine", c.gkt.combine, parse_combine);
    r.read_enum("activation", c.gkt.activation, act);
    r.read("dropout", c.gkt.dropout);
    read_fit(r, c.gkt_fit);
    r.finish();
  }
  if (const auto* s = root.section("dnn")) {
    ConfigReader r(*s, "dnn");
    r.read("layers", c.dnn.layers);
    r.read("hidden", c.dnn.hidden);
    r.read_enum("activation", c.dnn.activation, act);
    r.read("dropout", c.dnn.dropout);
    read_fit(r, c.dnn.fit);
    r.finish();
  }
  root.read("eval_pairs", c.eval_pairs);
  root.read("seeds", c.seeds);
  root.finish();
  c.validate();
  return c;
}

std::string config_hash(const DomainDataset& ds, const nlohmann::ordered_json& config) {
  std::ostringstream bytes;
  bytes << config.dump() << '\n' << ds.size() << ' ' << ds.dim() << ' ' << ds.n_classes << '\n';
  bytes.write(reinterpret_cast<const char*>(ds.features.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(ds.features.size())));
  for (std::size_t i = 0; i < ds.labels.size(); ++i) {
    bytes << ds.labels[i] << static_cast<int>(ds.domain[i]) << static_cast<int>(ds.split[i]) << ';';
  }
  for (const auto& [a, b] : ds.edges) bytes << a << ',' << b << ';';
  return fnv1a_hex(bytes.str());
}

ExperimentReport make_report(const std::string& kind, const DomainDataset& ds, Scenario scenario,
                             const PipelineConfig& c) {
  ExperimentReport r;
  r.kind = kind;
  r.scenario = to_string(scenario);
  r.config_hash = config_hash(ds, to_json(c));
  r.seeds = c.seeds;
  return r;
}

void finish_run_report(ExperimentReport& report, const DomainDataset& ds, const PipelineConfig& c) {
  report.notes["gkt_backbone"] = to_string(c.gkt.aggregation) + "/" + to_string(c.gkt.combine);
  if (ds.n_classes > 2) report.notes["auc"] = "one-vs-rest macro average";
}

AkrModel train_akr_stage(const DomainDataset& ds, const PipelineConfig& c, std::uint64_t seed, AkrTrainResult* curves) {
  AkrModel model(c.akr, ds.dim(), derive_seed(seed, 1));
  AkrTrainConfig t = c.akr_train;
  t.seed = derive_seed(seed, 2);
  auto result = train_akr(model, ds, t);
  if (curves) *curves = std::move(result);
  return model;
}

RetrievalOutput bridge_stage(const DomainDataset& ds, Scenario scenario, const PairSimilarity& sim, int k,
                             double eps_quantile) {
  RetrievalOutput out;
  out.map = retrieve_topk(sim, ds.domain, k);
  out.graph = build_bridged_graph(ds, out.map, scenario, sim, eps_quantile);
  return out;
}

GnnModel train_gkt_stage(const BridgedGraph& g, const GnnConfig& gkt, const FitConfig& fit, std::uint64_t seed,
                         FitCurves* curves) {
  GnnModel model(gkt, static_cast<int>(g.features.cols()), g.n_classes, derive_seed(seed, 3));
  FitConfig f = fit;
  f.seed = derive_seed(seed, 4);
  auto result = train_gkt(model, g, f);
  if (curves) *curves = std::move(result);
  return model;
}

Metrics target_test_metrics(const DomainDataset& ds, const Predictions& p) {
  const auto test = labeled_target(ds, Split::Test);
  if (test.empty()) throw DataError("no labeled target Test nodes");
  std::vector<int> truth, pred;
  Matrix scores(static_cast<Eigen::Index>(test.size()), p.scores.cols());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto v = static_cast<std::size_t>(test[i]);
    truth.push_back(ds.labels[v]);
    pred.push_back(p.label[v]);
    scores.row(static_cast<Eigen::Index>(i)) = p.scores.row(static_cast<Eigen::Index>(v));
  }
  return compute_metrics(truth, pred, scores);
}

BridgedGraph original_graph(const DomainDataset& ds, bool target_only) {
  BridgedGraph g = empty_graph(ds);
  for (const auto& [a, b] : ds.edges) {
    const bool inter = ds.domain[a] != ds.domain[b];
    if (target_only && (ds.domain[a] != Domain::Target || ds.domain[b] != Domain::Target)) continue;
    const auto prov = inter ? EdgeProvenance::ReusedInter : EdgeProvenance::ReusedIntra;
    g.edges.push_back(GraphEdge{a, b, prov});
    g.edges.push_back(GraphEdge{b, a, prov});
  }
  return g;
}

void run_baselines(const DomainDataset& ds, Scenario scenario, const PipelineConfig& c, std::uint64_t seed,
                   ExperimentReport& report) {
  for (auto s : {DnnStrategy::TargetOnly, DnnStrategy::Joint, DnnStrategy::PretrainFinetune}) {
    report.row(to_string(s)).add(target_test_metrics(ds, dnn_predict(ds, s, c.dnn, derive_seed(seed, 10 + static_cast<int>(s)))));
  }
  if (scenario == Scenario::UD) return;
  // GNN_T sees only target relations and target labels.
  BridgedGraph target = original_graph(ds, true);
  for (int v = 0; v < target.n_nodes; ++v) {
    if (target.domain[static_cast<std::size_t>(v)] == Domain::Source) target.split[static_cast<std::size_t>(v)] = Split::Unassigned;
  }
  const GnnModel gnn_t = train_gkt_stage(target, c.gkt, c.gkt_fit, derive_seed(seed, 20));
  report.row("GNN_T").add(target_test_metrics(ds, predict(gnn_t, target)));
  const BridgedGraph full = original_graph(ds, false);
  const GnnModel gnn_st = train_gkt_stage(full, c.gkt, c.gkt_fit, derive_seed(seed, 21));
  report.row("GNN_S+T").add(target_test_metrics(ds, predict(gnn_st, full)));
}

ExperimentReport run_pipeline(const DomainDataset& ds, Scenario scenario, const PipelineConfig& c) {
  c.validate();
  require_splits(ds);
  ExperimentReport report = make_report("run", ds, scenario, c);
  report.row(kBridged);
  for (std::uint64_t seed : c.seeds) {
    const AkrModel akr = train_akr_stage(ds, c, seed);
    const AkrState state = encode(akr, ds);
    report.row(kBridged).add(bridged_run(ds, scenario, similarity_index(state), c.k, c, seed));
    run_baselines(ds, scenario, c, seed, report);
  }
  finish_run_report(report, ds, c);
  return report;
}

std::vector<HomophilyPoint> homophily_sweep(const DomainDataset& ds, const std::vector<double>& grid,
                                            const PipelineConfig& c) {
  c.validate();
  require_splits(ds);
  for (double r : grid) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("homophily grid values must lie in [0, 1]");
  }
  const std::size_t g = grid.size();
  const std::size_t n_seeds = c.seeds.size();
  std::vector<HomophilyPoint> points(g * g * n_seeds);
  parallel_for(points.size(), [&](std::size_t job) {
    const std::size_t cell = job / n_seeds;
    const std::uint64_t seed = c.seeds[job % n_seeds];
    HomophilyPoint& p = points[job];
    p.r_intra = grid[cell / g];
    p.r_inter = grid[cell % g];
    p.seed = seed;
    Rng rng = make_rng(seed, 0x4000 + cell);
    const BridgedGraph graph = synth_homophily_graph(ds, p.r_intra, p.r_inter, rng);
    const GnnModel model = train_gkt_stage(graph, c.gkt, c.gkt_fit, derive_seed(seed, 0x5000 + cell));
    p.accuracy = test_accuracy(ds, predict(model, graph));
  });
  return points;
}

std::string homophily_csv(const std::vector<HomophilyPoint>& points) {
  std::ostringstream out;
  out << "r_intra,r_inter,seed,accuracy\n";
  char buf[64];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.accuracy);
    out << p.r_intra << ',' << p.r_inter << ',' << p.seed << ',' << buf << '\n';
  }
  return out.str();
}

ExperimentReport graph_ablation(const DomainDataset& ds, const PipelineConfig& c) {
  c.validate();
  require_splits(ds);
  if (ds.has_edges()) throw ConfigError("graph ablation expects an un-relational (UD) dataset");
  ExperimentReport report = make_report("graph-ablation", ds, Scenario::UD, c);
  for (const char* name : {"raw", "intra-only", "inter-only", "full"}) report.row(name);
  for (std::uint64_t seed : c.seeds) {
    const AkrModel akr = train_akr_stage(ds, c, seed);
    const auto full = bridge_stage(ds, Scenario::UD, similarity_index(encode(akr, ds)), c.k, c.eps_quantile).graph;
    const auto same = [&](const GraphEdge& e) { return ds.domain[e.src] == ds.domain[e.dst]; };
    const BridgedGraph variants[] = {
        empty_graph(ds),
        full.filtered(same),
        full.filtered([&](const GraphEdge& e) { return !same(e); }),
        full,
    };
    const char* names[] = {"raw", "intra-only", "inter-only", "full"};
    for (int i = 0; i < 4; ++i) {
      const GnnModel model = train_gkt_stage(variants[i], c.gkt, c.gkt_fit, seed);
      auto& row = report.row(names[i]);
      row.add(target_test_metrics(ds, predict(model, variants[i])));
      row.add("edges", static_cast<double>(variants[i].edges.size()));
    }
  }
  return report;
}

ExperimentReport similarity_ablation(const DomainDataset& ds, Scenario scenario, const PipelineConfig& c) {
  c.validate();
  require_splits(ds);
  ExperimentReport report = make_report("sim-ablation", ds, scenario, c);
  const char* names[] = {"raw-feature", "pointwise", "pairwise", "AKR"};
  for (const char* name : names) report.row(name);
  for (std::uint64_t seed : c.seeds) {
    const auto pairs = held_out_pairs(ds, c.eval_pairs, c.akr_train.max_class_num, derive_seed(seed, 30));
    AkrTrainConfig pair_cfg = c.akr_train;
    std::unique_ptr<PairSimilarity> learners[4];
    learners[0] = raw_feature_similarity(ds);
    learners[1] = pointwise_similarity(ds, c.dnn, derive_seed(seed, 31));
    learners[2] = pairwise_similarity(ds, pair_cfg, c.akr.hidden, derive_seed(seed, 32));
    learners[3] = std::make_unique<CosineSimilarity>(similarity_index(encode(train_akr_stage(ds, c, seed), ds)));
    for (int i = 0; i < 4; ++i) {
      auto& row = report.row(names[i]);
      row.add("intra_pair_f1", pair_macro_f1(*learners[i], pairs.intra));
      row.add("inter_pair_f1", pair_macro_f1(*learners[i], pairs.inter));
      const Metrics m = bridged_run(ds, scenario, *learners[i], c.k, c, seed);
      row.add("macro_f1", m.macro_f1);
      row.add("accuracy", m.accuracy);
    }
  }
  report.notes["pair_f1"] = "macro-F1 over held-out pair labels";
  return report;
}

ExperimentReport k_sweep(const DomainDataset& ds, Scenario scenario, const std::vector<int>& ks,
                         const PipelineConfig& c) {
  c.validate();
  require_splits(ds);
  if (ks.empty()) throw ConfigError("k sweep needs at least one K");
  ExperimentReport report = make_report("k-sweep", ds, scenario, c);
  for (const char* learner : {"AKR", "raw-feature"}) {
    for (int k : ks) report.row(std::string(learner) + " K=" + std::to_string(k));
  }
  for (std::uint64_t seed : c.seeds) {
    const CosineSimilarity akr = similarity_index(encode(train_akr_stage(ds, c, seed), ds));
    const auto raw = raw_feature_similarity(ds);
    for (int k : ks) {
      int edges = 0;
      auto& a = report.row("AKR K=" + std::to_string(k));
      a.add(bridged_run(ds, scenario, akr, k, c, seed, &edges));
      a.add("knn_edges", edges);
      auto& r = report.row("raw-feature K=" + std::to_string(k));
      r.add(bridged_run(ds, scenario, *raw, k, c, seed, &edges));
      r.add("knn_edges", edges);
    }
  }
  return report;
}

}  // namespace bridgekit

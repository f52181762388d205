#include "bridgekit/cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include "bridgekit/akr/retrieve.hpp"
#include "bridgekit/data/splits.hpp"
#include "bridgekit/error.hpp"
#include "bridgekit/eval/pipeline.hpp"

namespace bridgekit {

namespace {

void write_json(const nlohmann::ordered_json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw DataError("cannot create output directory '" + dir.string() + "'");
}

/// Reproducibility manifest: the resolved config and the stage seed.
nlohmann::ordered_json manifest(const RunConfig& c, const DomainDataset& ds, const char* stage, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["stage"] = stage;
  j["seed"] = seed;
  j["config_hash"] = config_hash(ds, to_json(c.pipeline));
  j["config"] = c.to_json();
  return j;
}

DomainDataset materialize(const RunConfig& c) {
  DomainDataset ds;
  switch (c.dataset.kind) {
    case DatasetSource::Kind::None: throw ConfigError("no dataset configured (set dataset.synthetic or dataset.files)");
    case DatasetSource::Kind::Synthetic: {
      SyncConfig s = c.dataset.synthetic;
      s.scenario = c.scenario;
      s.seed = c.seed;
      ds = generate_sync(s);
      break;
    }
    case DatasetSource::Kind::Files: ds = load_tabular(c.dataset.files); break;
  }
  return assign_splits(std::move(ds), c.target_train_frac, c.seed);
}

void save_dataset(const RunConfig& c, const DomainDataset& ds, const std::filesystem::path& dir) {
  ensure_dir(dir);
  save_tabular(ds, TabularPaths::in_directory(dir));
  save_splits(ds, dir / "splits.txt");
  auto m = manifest(c, ds, "gen", c.seed);
  m["n_nodes"] = ds.size();
  m["n_source"] = ds.count(Domain::Source);
  m["n_target"] = ds.count(Domain::Target);
  m["dim"] = ds.dim();
  m["n_classes"] = ds.n_classes;
  m["n_edges"] = ds.edges.size();
  write_json(m, dir / "manifest.json");
}

}  // namespace

DomainDataset stage_dataset(const RunConfig& c) {
  const StageLayout out{c.output};
  const auto dir = out.dataset();
  if (std::filesystem::exists(dir / "manifest.json")) {
    DomainDataset ds = load_tabular(TabularPaths::in_directory(dir));
    load_splits(ds, dir / "splits.txt");
    return ds;
  }
  DomainDataset ds = materialize(c);
  save_dataset(c, ds, dir);
  return ds;
}

void cmd_gen(const RunConfig& c) {
  if (c.dataset.kind != DatasetSource::Kind::Synthetic) throw ConfigError("gen needs a dataset.synthetic section");
  const DomainDataset ds = materialize(c);
  save_dataset(c, ds, StageLayout{c.output}.dataset());
  std::cout << "wrote " << ds.size() << " rows (" << ds.count(Domain::Source) << " source, "
            << ds.count(Domain::Target) << " target) and " << ds.edges.size() << " edges to "
            << StageLayout{c.output}.dataset().string() << '\n';
}

void stage_train_akr(const RunConfig& c, const DomainDataset& ds, const StageLayout& dir, std::uint64_t seed) {
  ensure_dir(dir.akr());
  AkrTrainResult curves;
  const AkrModel model = train_akr_stage(ds, c.pipeline, seed, &curves);
  model.save(dir.akr());
  auto log = manifest(c, ds, "train-akr", seed);
  auto& rows = log["curves"];
  rows = nlohmann::ordered_json::array();
  for (const auto& e : curves.curves) {
    rows.push_back({{"epoch", e.epoch},
                    {"reconstruction", e.reconstruction},
                    {"generator", e.generator},
                    {"classification", e.classification},
                    {"critic", e.critic}});
  }
  write_json(log, dir.akr() / "curves.json");
}

void stage_build_graph(const RunConfig& c, const DomainDataset& ds, const StageLayout& dir, std::uint64_t seed) {
  if (!std::filesystem::exists(dir.akr() / "akr_manifest.json")) {
    throw DataError("no trained retrieval model under '" + dir.akr().string() + "' (run train-akr first)");
  }
  const AkrModel model = AkrModel::load(dir.akr());
  if (model.input_dim() != ds.dim()) throw DataError("retrieval model width does not match the dataset");
  const CosineSimilarity sim = similarity_index(encode(model, ds));
  const auto out = bridge_stage(ds, c.scenario, sim, c.pipeline.k, c.pipeline.eps_quantile);
  save_knowledge_map(out.map, dir.knowledge_map());
  save_graph(out.graph, dir.graph());
  auto summary = manifest(c, ds, "build-graph", seed);
  summary["k"] = c.pipeline.k;
  summary["eps_quantile"] = c.pipeline.eps_quantile;
  if (c.scenario != Scenario::UD) summary["epsilon"] = similarity_quantile(sim, c.pipeline.eps_quantile);
  summary["edges"] = {{"knn", out.graph.count(EdgeProvenance::Knn)},
                      {"reused-intra", out.graph.count(EdgeProvenance::ReusedIntra)},
                      {"reused-inter", out.graph.count(EdgeProvenance::ReusedInter)},
                      {"total", out.graph.edges.size()}};
  write_json(summary, dir.graph_summary());
}

void stage_train_gkt(const RunConfig& c, const DomainDataset& ds, const StageLayout& dir, std::uint64_t seed) {
  if (!std::filesystem::exists(dir.graph())) {
    throw DataError("no graph at '" + dir.graph().string() + "' (run build-graph first)");
  }
  const BridgedGraph g = load_graph(dir.graph(), ds);
  FitCurves curves;
  const GnnModel model = train_gkt_stage(g, c.pipeline.gkt, c.pipeline.gkt_fit, seed, &curves);
  model.save(dir.gkt());
  const Predictions p = predict(model, g);
  save_predictions(p, dir.predictions());
  auto log = manifest(c, ds, "train-gkt", seed);
  log["best_epoch"] = curves.best_epoch;
  log["best_val_macro_f1"] = curves.best_val_macro_f1;
  log["train_loss"] = curves.train_loss;
  log["val_macro_f1"] = curves.val_macro_f1;
  write_json(log, dir.gkt() / "curves.json");
  const Metrics m = target_test_metrics(ds, p);
  auto metrics = manifest(c, ds, "train-gkt", seed);
  metrics["target_test"] = {{"accuracy", m.accuracy},
                            {"binary_f1", m.binary_f1},
                            {"macro_f1", m.macro_f1},
                            {"micro_f1", m.micro_f1},
                            {"auc", m.auc}};
  write_json(metrics, dir.metrics());
}

void cmd_train_akr(const RunConfig& c) {
  const DomainDataset ds = stage_dataset(c);
  const StageLayout dir{c.output};
  stage_train_akr(c, ds, dir, c.pipeline.seeds.front());
  std::cout << "retrieval model written to " << dir.akr().string() << '\n';
}

void cmd_build_graph(const RunConfig& c) {
  const DomainDataset ds = stage_dataset(c);
  const StageLayout dir{c.output};
  stage_build_graph(c, ds, dir, c.pipeline.seeds.front());
  std::ifstream in(dir.graph_summary());
  const auto summary = nlohmann::json::parse(in);
  std::cout << "graph written to " << dir.graph().string() << ": " << summary["edges"].dump() << '\n';
}

void cmd_train_gkt(const RunConfig& c) {
  const DomainDataset ds = stage_dataset(c);
  const StageLayout dir{c.output};
  stage_train_gkt(c, ds, dir, c.pipeline.seeds.front());
  std::ifstream in(dir.metrics());
  const auto metrics = nlohmann::json::parse(in);
  std::cout << "target test metrics: " << metrics["target_test"].dump() << '\n';
}

ExperimentReport cmd_run(const RunConfig& c) {
  const DomainDataset ds = stage_dataset(c);
  ExperimentReport report = make_report("run", ds, c.scenario, c.pipeline);
  report.row("Bridged-GNN");
  for (std::uint64_t seed : c.pipeline.seeds) {
    const StageLayout dir{c.output / ("seed_" + std::to_string(seed))};
    ensure_dir(dir.root);
    stage_train_akr(c, ds, dir, seed);
    stage_build_graph(c, ds, dir, seed);
    stage_train_gkt(c, ds, dir, seed);
    report.row("Bridged-GNN").add(target_test_metrics(ds, load_predictions(dir.predictions())));
    run_baselines(ds, c.scenario, c.pipeline, seed, report);
  }
  finish_run_report(report, ds, c.pipeline);
  write_report(report, c.output, "report");
  write_json(c.to_json(), c.output / "config.json");
  std::cout << to_text(report);
  return report;
}

void cmd_sweep(const RunConfig& c, const std::string& kind) {
  if (kind != "homophily" && kind != "k" && kind != "graph-ablation" && kind != "sim-ablation") {
    throw ConfigError("unknown sweep kind '" + kind + "' (expected homophily, k, graph-ablation or sim-ablation)");
  }
  const DomainDataset ds = stage_dataset(c);
  write_json(c.to_json(), c.output / "config.json");
  if (kind == "homophily") {
    const auto points = homophily_sweep(ds, c.homophily_grid, c.pipeline);
    write_text(homophily_csv(points), c.output / "homophily.csv");
    ExperimentReport report = make_report("homophily", ds, c.scenario, c.pipeline);
    for (const auto& p : points) {
      char name[64];
      std::snprintf(name, sizeof(name), "r_intra=%.2f r_inter=%.2f", p.r_intra, p.r_inter);
      report.row(name).add("accuracy", p.accuracy);
    }
    write_report(report, c.output, "homophily");
    std::cout << to_text(report);
    return;
  }
  ExperimentReport report;
  if (kind == "k") report = k_sweep(ds, c.scenario, c.k_values, c.pipeline);
  if (kind == "graph-ablation") report = graph_ablation(ds, c.pipeline);
  if (kind == "sim-ablation") report = similarity_ablation(ds, c.scenario, c.pipeline);
  write_report(report, c.output, report.kind);
  std::cout << to_text(report);
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir, const std::string& name) {
  ensure_dir(dir);
  write_json(to_json(report), dir / (name + ".json"));
  write_text(to_text(report), dir / (name + ".txt"));
}

}  // namespace bridgekit

#include "bridgekit/cli/run_config.hpp"

#include <fstream>

#include "bridgekit/config_reader.hpp"
#include "bridgekit/error.hpp"

namespace bridgekit {

namespace {

void default_seeds(RunConfig& c) {
  if (!c.seeds_explicit) c.pipeline.seeds = {c.seed, c.seed + 1, c.seed + 2};
}

}  // namespace

void RunConfig::validate() const {
  if (dataset.kind == DatasetSource::Kind::Synthetic) dataset.synthetic.validate();
  if (!(target_train_frac > 0.0 && target_train_frac < 1.0)) throw ConfigError("target_train_frac must lie in (0, 1)");
  pipeline.validate();
  if (homophily_grid.empty()) throw ConfigError("homophily_grid must not be empty");
  for (double r : homophily_grid) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("homophily_grid values must lie in [0, 1]");
  }
  if (k_values.empty()) throw ConfigError("k_values must not be empty");
  for (int k : k_values) {
    if (k < 1) throw ConfigError("k_values must be positive");
  }
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  switch (dataset.kind) {
    case DatasetSource::Kind::None: j["dataset"] = nullptr; break;
    case DatasetSource::Kind::Synthetic: {
      const auto& s = dataset.synthetic;
      j["dataset"]["synthetic"] = {{"n_src", s.n_src},
                                   {"n_tgt", s.n_tgt},
                                   {"dim", s.dim},
                                   {"n_classes", s.n_classes},
                                   {"class_sep", s.class_sep},
                                   {"marginal_shift", s.marginal_shift},
                                   {"conditional_shift", s.conditional_shift},
                                   {"edge_prob_intra", s.edge_prob_intra},
                                   {"homophily_bias", s.homophily_bias},
                                   {"n_inter_edges", s.n_inter_edges}};
      break;
    }
    case DatasetSource::Kind::Files: {
      auto& f = j["dataset"]["files"];
      f["features"] = dataset.files.features.string();
      f["labels"] = dataset.files.labels.string();
      f["domains"] = dataset.files.domains.string();
      if (dataset.files.edges) f["edges"] = dataset.files.edges->string();
      break;
    }
  }
  j["scenario"] = to_string(scenario);
  j["target_train_frac"] = target_train_frac;
  j["seed"] = seed;
  const auto stages = bridgekit::to_json(pipeline);
  for (const auto& [key, value] : stages.items()) j[key] = value;
  j["sweep"] = {{"homophily_grid", homophily_grid}, {"k_values", k_values}};
  j["output"] = output.string();
  return j;
}

RunConfig parse_run_config(const nlohmann::json& j) {
  RunConfig c;
  ConfigReader root(j, "");
  std::function<Scenario(const std::string&)> scen = parse_scenario;
  root.read_enum("scenario", c.scenario, scen);
  root.read("target_train_frac", c.target_train_frac);
  root.read("seed", c.seed);
  std::string output = c.output.string();
  root.read("output", output);
  c.output = output;
  c.dataset.synthetic = sync_preset(c.scenario, c.seed);

  if (const auto* d = root.section("dataset")) {
    ConfigReader r(*d, "dataset");
    const auto* syn = r.section("synthetic");
    const auto* files = r.section("files");
    r.finish();
    if (syn && files) throw ConfigError("dataset: give either 'synthetic' or 'files', not both");
    if (syn) {
      ConfigReader s(*syn, "dataset.synthetic");
      auto& sc = c.dataset.synthetic;
      s.read("n_src", sc.n_src);
      s.read("n_tgt", sc.n_tgt);
      s.read("dim", sc.dim);
      s.read("n_classes", sc.n_classes);
      s.read("class_sep", sc.class_sep);
      s.read("marginal_shift", sc.marginal_shift);
      s.read("conditional_shift", sc.conditional_shift);
      s.read("edge_prob_intra", sc.edge_prob_intra);
      s.read("homophily_bias", sc.homophily_bias);
      s.read("n_inter_edges", sc.n_inter_edges);
      s.finish();
      c.dataset.kind = DatasetSource::Kind::Synthetic;
    } else if (files) {
      ConfigReader f(*files, "dataset.files");
      std::string dir, features, labels, domains, edges;
      f.read("dir", dir);
      f.read("features", features);
      f.read("labels", labels);
      f.read("domains", domains);
      f.read("edges", edges);
      f.finish();
      if (!dir.empty()) {
        c.dataset.files = TabularPaths::in_directory(dir);
        if (!std::filesystem::exists(*c.dataset.files.edges)) c.dataset.files.edges.reset();
      }
      if (!features.empty()) c.dataset.files.features = features;
      if (!labels.empty()) c.dataset.files.labels = labels;
      if (!domains.empty()) c.dataset.files.domains = domains;
      if (!edges.empty()) c.dataset.files.edges = edges;
      if (c.dataset.files.features.empty() || c.dataset.files.labels.empty() || c.dataset.files.domains.empty()) {
        throw ConfigError("dataset.files needs 'dir' or all of features, labels and domains");
      }
      c.dataset.kind = DatasetSource::Kind::Files;
    }
  }

  // Stage hyperparameters share the top level with the keys above.
  nlohmann::json stage = nlohmann::json::object();
  for (const char* key : {"akr", "retrieval", "gkt", "dnn", "eval_pairs", "seeds"}) {
    if (const auto* s = root.section(key)) stage[key] = *s;
  }
  c.seeds_explicit = stage.contains("seeds");
  PipelineConfig base = default_pipeline_config(c.scenario);
  if (!c.seeds_explicit) stage["seeds"] = std::vector<std::uint64_t>{c.seed, c.seed + 1, c.seed + 2};
  c.pipeline = pipeline_config_from_json(stage, base);

  if (const auto* s = root.section("sweep")) {
    ConfigReader r(*s, "sweep");
    r.read("homophily_grid", c.homophily_grid);
    r.read("k_values", c.k_values);
    r.finish();
  }
  root.finish();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

void apply_overrides(RunConfig& c, std::optional<std::uint64_t> seed, std::optional<std::filesystem::path> out) {
  if (seed) {
    c.seed = *seed;
    c.dataset.synthetic.seed = *seed;
    default_seeds(c);
  }
  if (out) c.output = *out;
  c.validate();
}

}  // namespace bridgekit

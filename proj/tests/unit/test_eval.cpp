#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bridgekit/error.hpp"
#include "bridgekit/eval/metrics.hpp"
#include "bridgekit/eval/pipeline.hpp"
#include "bridgekit/eval/report.hpp"
#include "toy.hpp"

using namespace bridgekit;

namespace {

/// Counts positive/negative pairs directly.
double auc_by_pairs(const std::vector<int>& pos, const std::vector<double>& s) {
  double wins = 0, total = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (pos[i] && !pos[j]) {
        total += 1;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
    }
  }
  return wins / total;
}

PipelineConfig tiny_config(Scenario sc) {
  PipelineConfig c = default_pipeline_config(sc);
  c.akr.hidden = c.akr.embed = c.akr.pool_width = c.akr.sim_width = 8;
  c.akr.decoder_hidden = c.akr.critic_hidden = 8;
  c.akr.encoder_layers = 2;
  c.akr_train.epochs = 3;
  c.akr_train.n_pair = 32;
  c.akr_train.critic_steps = 1;
  c.k = 3;
  c.gkt.hidden = 8;
  c.gkt_fit.epochs = 5;
  c.dnn.hidden = 8;
  c.dnn.fit.epochs = 5;
  c.eval_pairs = 40;
  c.seeds = {0, 1};
  return c;
}

}  // namespace

TEST_CASE("perfect predictions score one everywhere") {
  const std::vector<int> y{0, 1, 1, 0, 1};
  const Matrix scores = make_matrix({{0.9, 0.1}, {0.2, 0.8}, {0.3, 0.7}, {0.6, 0.4}, {0.1, 0.9}});
  const Metrics m = compute_metrics(y, y, scores);
  CHECK(m.accuracy == 1.0);
  CHECK(m.binary_f1 == 1.0);
  CHECK(m.macro_f1 == 1.0);
  CHECK(m.micro_f1 == 1.0);
  CHECK(m.auc == 1.0);
}

TEST_CASE("one missed positive: F1 2/3, accuracy 3/4") {
  const std::vector<int> truth{1, 1, 0, 0};
  const std::vector<int> pred{1, 0, 0, 0};
  CHECK(class_f1(truth, pred, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(accuracy(truth, pred) == 0.75);
  CHECK(class_f1(truth, pred, 0) == doctest::Approx(0.8));
  CHECK(macro_f1(truth, pred, 2) == doctest::Approx((2.0 / 3.0 + 0.8) / 2.0));
  CHECK(micro_f1(truth, pred) == 0.75);
}

TEST_CASE("a class absent from truth and prediction contributes zero to macro-F1") {
  const std::vector<int> y{0, 1, 0, 1};
  CHECK(class_f1(y, y, 2) == 0.0);
  CHECK(macro_f1(y, y, 3) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(accuracy({0, 1}, {0}), ConfigError);
}

TEST_CASE("AUC: perfect, inverted, ties and degenerate groups") {
  CHECK(binary_auc({1, 1, 0, 0}, {0.9, 0.8, 0.2, 0.1}) == 1.0);
  CHECK(binary_auc({1, 1, 0, 0}, {0.1, 0.2, 0.8, 0.9}) == 0.0);
  CHECK(binary_auc({1, 0}, {0.5, 0.5}) == 0.5);
  CHECK(binary_auc({1, 1, 0}, {0.7, 0.4, 0.4}) == 0.75);
  CHECK(binary_auc({1, 1}, {0.1, 0.2}) == 0.5);
}

TEST_CASE("AUC matches pair counting on random scores with ties") {
  for (std::uint64_t seed : {1, 2, 3}) {
    Rng rng(seed);
    std::vector<int> pos;
    std::vector<double> s;
    for (int i = 0; i < 60; ++i) {
      pos.push_back(uniform01(rng) < 0.4 ? 1 : 0);
      s.push_back(std::floor(uniform01(rng) * 8.0) / 8.0);
    }
    CHECK(binary_auc(pos, s) == doctest::Approx(auc_by_pairs(pos, s)).epsilon(1e-12));
  }
}

TEST_CASE("multi-class AUC is the one-vs-rest mean") {
  const std::vector<int> y{0, 1, 2, 0, 1, 2};
  const Matrix s = make_matrix({{0.6, 0.3, 0.1}, {0.5, 0.4, 0.1}, {0.2, 0.2, 0.6}, {0.3, 0.3, 0.4}, {0.1, 0.8, 0.1},
                                {0.3, 0.1, 0.6}});
  double expected = 0.0;
  for (int c = 0; c < 3; ++c) {
    std::vector<int> pos;
    std::vector<double> col;
    for (int i = 0; i < 6; ++i) {
      pos.push_back(y[i] == c);
      col.push_back(s(i, c));
    }
    expected += auc_by_pairs(pos, col) / 3.0;
  }
  CHECK(compute_metrics(y, y, s).auc == doctest::Approx(expected));
  CHECK_THROWS_AS(compute_metrics(y, y, Matrix::Zero(5, 3)), ConfigError);
}

TEST_CASE("population std, spearman and the digest") {
  CHECK(population_std({1, 3}) == 1.0);
  CHECK(population_std({5}) == 0.0);
  CHECK(mean_of({}) == 0.0);
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 2, 3}, {5, 5, 5}) == 0.0);
  // Mid-ranks: y ranks {1.5, 1.5, 3}; Pearson of {1,2,3} with those is sqrt(3)/2.
  CHECK(spearman({1, 2, 3}, {0, 0, 1}) == doctest::Approx(std::sqrt(3.0) / 2.0));
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("report JSON carries per-seed values, mean and std per row") {
  ExperimentReport r;
  r.kind = "run";
  r.scenario = "UD";
  r.config_hash = "00";
  r.seeds = {0, 1};
  r.row("A").add("accuracy", 0.5);
  r.row("A").add("accuracy", 0.7);
  r.row("A").add("edges", 10);
  r.row("A").add("edges", 12);
  const auto j = to_json(r);
  const auto& m = j["rows"][0]["metrics"]["accuracy"];
  CHECK(j["rows"][0]["method"] == "A");
  CHECK(j["rows"][0]["seeds"].size() == 2);
  CHECK(m["mean"].get<double>() == doctest::Approx(0.6));
  CHECK(m["std"].get<double>() == doctest::Approx(0.1));
  CHECK(m["per_seed"].size() == 2);
  const std::string text = to_text(r);
  CHECK(text.find("60.00 +- 10.00") != std::string::npos);
  CHECK(text.find("11.00 +- 1.00") != std::string::npos);
  CHECK(is_count_metric("knn_edges"));
  CHECK_FALSE(is_count_metric("macro_f1"));
  CHECK_THROWS_AS(r.row("A").get("auc"), ConfigError);
}

TEST_CASE("pipeline config JSON round-trips and rejects unknown keys") {
  const auto c = default_pipeline_config(Scenario::RDIntra);
  const auto back = pipeline_config_from_json(nlohmann::json::parse(to_json(c).dump()), PipelineConfig{});
  CHECK(to_json(back) == to_json(c));
  CHECK_THROWS_AS(pipeline_config_from_json(nlohmann::json{{"bogus", 1}}, c), ConfigError);
  PipelineConfig none = c;
  none.seeds.clear();
  CHECK_THROWS_AS(none.validate(), ConfigError);
}

TEST_CASE("config hash depends on config and data") {
  const auto ds = toy::dataset(20, 20, 4, 2, 1);
  const auto c = tiny_config(Scenario::UD);
  auto d = c;
  d.k = 4;
  CHECK(config_hash(ds, to_json(c)) == config_hash(ds, to_json(c)));
  CHECK(config_hash(ds, to_json(c)) != config_hash(ds, to_json(d)));
  CHECK(config_hash(ds, to_json(c)) != config_hash(toy::dataset(20, 20, 4, 2, 2), to_json(c)));
}

TEST_CASE("run_pipeline on a tiny UD dataset: rows, seeds and determinism") {
  const auto ds = toy::dataset(40, 40, 5, 2, 3);
  const auto c = tiny_config(Scenario::UD);
  const auto a = run_pipeline(ds, Scenario::UD, c);
  const auto b = run_pipeline(ds, Scenario::UD, c);
  CHECK(to_json(a).dump() == to_json(b).dump());
  for (const char* name : {"Bridged-GNN", "DNN_T", "DNN_S+T", "DNN_S->T"}) {
    CAPTURE(name);
    CHECK(a.row(name).get("macro_f1").size() == 2);
  }
  CHECK_THROWS_AS(a.row("GNN_T"), ConfigError);
}

TEST_CASE("run_pipeline on a tiny relational dataset adds the original-graph baselines") {
  const auto ds = toy::dataset(40, 40, 5, 2, 4, Scenario::RDIntraInter);
  const auto a = run_pipeline(ds, Scenario::RDIntraInter, tiny_config(Scenario::RDIntraInter));
  CHECK(a.row("GNN_T").get("accuracy").size() == 2);
  CHECK(a.row("GNN_S+T").get("accuracy").size() == 2);
  for (const auto& row : a.rows) {
    const double acc = row.mean("accuracy");
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
  }
}

TEST_CASE("homophily sweep: grid order, CSV header, bad grid") {
  const auto ds = toy::dataset(40, 40, 5, 2, 5);
  auto c = tiny_config(Scenario::UD);
  c.seeds = {0};
  const auto pts = homophily_sweep(ds, {0.0, 1.0}, c);
  REQUIRE(pts.size() == 4);
  CHECK(pts[1].r_intra == 0.0);
  CHECK(pts[1].r_inter == 1.0);
  CHECK(pts[2].r_intra == 1.0);
  CHECK(homophily_csv(pts).rfind("r_intra,r_inter,seed,accuracy\n", 0) == 0);
  CHECK_THROWS_AS(homophily_sweep(ds, {1.5}, c), ConfigError);
}

TEST_CASE("graph ablation edge counts: intra + inter = full, raw has none") {
  const auto ds = toy::dataset(40, 40, 5, 2, 6);
  auto c = tiny_config(Scenario::UD);
  c.seeds = {0};
  const auto r = graph_ablation(ds, c);
  const double full = r.row("full").mean("edges");
  CHECK(r.row("raw").mean("edges") == 0.0);
  CHECK(r.row("intra-only").mean("edges") + r.row("inter-only").mean("edges") == full);
  CHECK(full == 3.0 * ds.size());
  CHECK_THROWS_AS(graph_ablation(toy::dataset(40, 40, 5, 2, 6, Scenario::RDIntra), c), ConfigError);
}

TEST_CASE("K sweep records exactly K * N knn edges") {
  const auto ds = toy::dataset(30, 30, 5, 2, 7);
  auto c = tiny_config(Scenario::UD);
  c.seeds = {0};
  const auto r = k_sweep(ds, Scenario::UD, {1, 4}, c);
  CHECK(r.row("AKR K=1").mean("knn_edges") == ds.size());
  CHECK(r.row("raw-feature K=4").mean("knn_edges") == 4.0 * ds.size());
}

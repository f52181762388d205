#include <doctest.h>

#include <cstring>
#include <fstream>
#include <queue>

#include "bridgekit/error.hpp"
#include "bridgekit/eval/metrics.hpp"
#include "bridgekit/gkt/model.hpp"
#include "bridgekit/gkt/train.hpp"
#include "bridgekit/graph/bridged_graph.hpp"
#include "bridgekit/numerics/gradcheck.hpp"
#include "toy.hpp"

using namespace bridgekit;

namespace {

BridgedGraph graph_of(const Matrix& x, const std::vector<std::pair<int, int>>& edges) {
  BridgedGraph g;
  g.n_nodes = static_cast<int>(x.rows());
  g.features = x;
  g.domain.assign(static_cast<std::size_t>(g.n_nodes), Domain::Target);
  g.labels.assign(static_cast<std::size_t>(g.n_nodes), 0);
  g.split.assign(static_cast<std::size_t>(g.n_nodes), Split::Train);
  g.n_classes = 2;
  for (auto [s, d] : edges) g.edges.push_back(GraphEdge{s, d, EdgeProvenance::Knn});
  return g;
}

/// Six nodes, two classes, a mix of in-degrees including an isolated node.
BridgedGraph six_nodes(std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(6, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = standard_normal(rng);
  auto g = graph_of(x, {{0, 1}, {2, 1}, {1, 3}, {3, 4}, {4, 3}, {0, 4}, {2, 4}});
  g.labels = {0, 1, 0, 1, 1, 0};
  return g;
}

GnnConfig plain(int layers, int hidden, Aggregation agg, Combine comb, Activation act) {
  GnnConfig c;
  c.layers = layers;
  c.hidden = hidden;
  c.aggregation = agg;
  c.combine = comb;
  c.activation = act;
  c.dropout = 0.0;
  return c;
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

TEST_CASE("mean aggregation with concat: b sees [x_b | x_a] after edge a -> b") {
  const auto g = graph_of(make_matrix({{1, 2}, {3, 4}}), {{0, 1}});
  GnnModel m(plain(1, 4, Aggregation::Mean, Combine::Concat, Activation::Identity), 2, 4, 1);
  m.params().get("layer0.weight").value = Matrix::Identity(4, 4);
  m.params().get("head.weight").value = Matrix::Identity(4, 4);
  const Matrix z = gnn_forward(m, g);
  CHECK(z.row(1) == make_matrix({{3, 4, 1, 2}}));
  CHECK(z.row(0) == make_matrix({{1, 2, 0, 0}}));
}

TEST_CASE("sum combine on an isolated node gives activation(x W)") {
  const auto g = graph_of(make_matrix({{1, -2}, {0.5, 3}}), {});
  GnnModel m(plain(1, 2, Aggregation::Mean, Combine::Sum, Activation::Relu), 2, 2, 1);
  m.params().get("layer0.weight").value = Matrix::Identity(2, 2);
  m.params().get("head.weight").value = Matrix::Identity(2, 2);
  const Matrix z = gnn_forward(m, g);
  CHECK(z == make_matrix({{1, 0}, {0.5, 3}}));
}

TEST_CASE("zero edges with concat equals an MLP on [x | 0]") {
  Rng rng(2);
  Matrix x(5, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = standard_normal(rng);
  const auto g = graph_of(x, {});
  GnnModel m(plain(2, 4, Aggregation::Mean, Combine::Concat, Activation::Tanh), 3, 2, 3);
  const auto& p = m.params();
  Matrix h = x;
  for (const char* layer : {"layer0", "layer1"}) {
    Matrix padded = Matrix::Zero(h.rows(), 2 * h.cols());
    padded.leftCols(h.cols()) = h;
    const Matrix pre =
        (padded * p.get(std::string(layer) + ".weight").value).rowwise() + RowVector(p.get(std::string(layer) + ".bias").value);
    h = pre.array().tanh().matrix();
  }
  const Matrix expected = (h * p.get("head.weight").value).rowwise() + RowVector(p.get("head.bias").value);
  CHECK((gnn_forward(m, g) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("aggregation matrices: mean weights and symmetric gcn normalization with self-loops") {
  const auto g = graph_of(Matrix::Zero(4, 1), {{0, 1}, {2, 1}, {1, 3}, {0, 3}});
  const SparseMatrix mean = *aggregation_matrix(g, Aggregation::Mean);
  CHECK(mean.coeff(1, 0) == 0.5);
  CHECK(mean.coeff(1, 2) == 0.5);
  CHECK(mean.coeff(3, 1) == 0.5);
  CHECK(mean.coeff(0, 0) == 0.0);
  CHECK(mean.row(0).sum() == 0.0);
  const SparseMatrix gcn = *aggregation_matrix(g, Aggregation::GcnNormalized);
  // d_in = {0, 2, 0, 2}, d_out = {2, 1, 1, 0}
  CHECK(gcn.coeff(1, 0) == doctest::Approx(1.0 / (std::sqrt(3.0) * std::sqrt(3.0))));
  CHECK(gcn.coeff(1, 2) == doctest::Approx(1.0 / (std::sqrt(3.0) * std::sqrt(2.0))));
  CHECK(gcn.coeff(3, 1) == doctest::Approx(1.0 / (std::sqrt(3.0) * std::sqrt(2.0))));
  CHECK(gcn.coeff(1, 1) == doctest::Approx(1.0 / (std::sqrt(3.0) * std::sqrt(2.0))));
  CHECK(gcn.coeff(0, 0) == doctest::Approx(1.0 / (std::sqrt(1.0) * std::sqrt(3.0))));
  CHECK(gcn.coeff(3, 3) == doctest::Approx(1.0 / (std::sqrt(3.0) * std::sqrt(1.0))));
}

TEST_CASE("permutation equivariance") {
  const auto g = six_nodes(3);
  const std::vector<int> perm{4, 2, 5, 0, 1, 3};  // new id of old node i
  Matrix xp(6, 3);
  for (int i = 0; i < 6; ++i) xp.row(perm[i]) = g.features.row(i);
  std::vector<std::pair<int, int>> ep;
  for (const auto& e : g.edges) ep.push_back({perm[e.src], perm[e.dst]});
  const auto gp = graph_of(xp, ep);
  for (auto [agg, comb] : {std::pair{Aggregation::Mean, Combine::Concat}, std::pair{Aggregation::GcnNormalized, Combine::AggregateOnly},
                           std::pair{Aggregation::Mean, Combine::Sum}}) {
    GnnModel m(plain(2, 5, agg, comb, Activation::Relu), 3, 2, 4);
    const Matrix z = gnn_forward(m, g);
    const Matrix zp = gnn_forward(m, gp);
    for (int i = 0; i < 6; ++i) CHECK((z.row(i) - zp.row(perm[i])).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("removing the in-edges of v changes only v and its descendants") {
  const auto g = six_nodes(4);
  for (int v = 0; v < 6; ++v) {
    const auto cut = g.filtered([v](const GraphEdge& e) { return e.dst != v; });
    std::vector<bool> reach(6, false);
    std::queue<int> frontier;
    reach[v] = true;
    frontier.push(v);
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (const auto& e : g.edges) {
        if (e.src == u && !reach[e.dst]) {
          reach[e.dst] = true;
          frontier.push(e.dst);
        }
      }
    }
    GnnModel m(plain(2, 5, Aggregation::Mean, Combine::Concat, Activation::Tanh), 3, 2, 5);
    const Matrix before = gnn_forward(m, g);
    const Matrix after = gnn_forward(m, cut);
    for (int u = 0; u < 6; ++u) {
      if (!reach[u]) CHECK((before.row(u) - after.row(u)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("gradient check on a six-node graph") {
  const auto g = six_nodes(5);
  for (auto [agg, comb] : {std::pair{Aggregation::Mean, Combine::Concat}, std::pair{Aggregation::GcnNormalized, Combine::AggregateOnly},
                           std::pair{Aggregation::GcnNormalized, Combine::Sum}}) {
    for (Activation act : {Activation::Relu, Activation::Tanh}) {
      GnnModel m(plain(2, 4, agg, comb, act), 3, 2, 6);
      const auto adj = aggregation_matrix(g, agg);
      auto loss = [&](Tape& t) {
        return softmax_cross_entropy(m.forward(t, adj, t.constant(g.features), nullptr), g.labels, {0, 1, 2, 3, 4, 5});
      };
      const auto r = check_gradients(loss, m.params(), 1e-5);
      CAPTURE(r.worst_param);
      CHECK(r.max_rel_error < 1e-4);
    }
  }
}

TEST_CASE("feature width mismatch is a configuration error") {
  const auto g = six_nodes(6);
  GnnModel m(GnnConfig{}, 4, 2, 1);
  CHECK_THROWS_AS(gnn_forward(m, g), ConfigError);
  GnnConfig bad;
  bad.layers = 0;
  CHECK_THROWS_AS(GnnModel(bad, 3, 2, 1), ConfigError);
}

TEST_CASE("predictions: argmax with ties to the lower class, softmax scores") {
  const auto p = predict_from_logits(make_matrix({{2, -1}, {0, 0}, {-3, 5}}));
  CHECK(p.label == std::vector<int>{0, 0, 1});
  CHECK(p.scores(1, 0) == 0.5);
  CHECK(p.scores(1, 1) == 0.5);
  CHECK(p.scores.row(0).sum() == doctest::Approx(1.0));
}

TEST_CASE("predictions CSV has a header and round-trips") {
  const auto dir = toy::scratch_dir("predictions");
  const auto p = predict_from_logits(make_matrix({{2, -1, 0.5}, {0, 0, 0}}));
  save_predictions(p, dir / "p.csv");
  std::ifstream in(dir / "p.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "node,pred,score_0,score_1,score_2");
  const auto back = load_predictions(dir / "p.csv");
  CHECK(back.label == p.label);
  CHECK(bitwise_equal(back.scores, p.scores));
}

TEST_CASE("train_gkt: zero epochs leave parameters unchanged; no labels is an error") {
  const auto ds = toy::dataset(30, 30, 6, 2, 7);
  auto g = empty_graph(ds);
  GnnModel m(GnnConfig{}, ds.dim(), 2, 1);
  const auto before = m.params().snapshot();
  FitConfig fc;
  fc.epochs = 0;
  const auto curves = train_gkt(m, g, fc);
  CHECK(curves.best_epoch == -1);
  const auto after = m.params().snapshot();
  for (std::size_t k = 0; k < before.size(); ++k) CHECK(bitwise_equal(before[k], after[k]));
  for (auto& s : g.split) s = Split::Test;
  CHECK_THROWS_AS(train_gkt(m, g, FitConfig{}), DataError);
}

TEST_CASE("train_gkt is deterministic and restores the best validation snapshot") {
  const auto ds = toy::dataset(60, 60, 6, 2, 8);
  Rng rng(1);
  const auto g = synth_homophily_graph(ds, 0.75, 0.75, rng);
  FitConfig fc;
  fc.epochs = 60;
  fc.patience = 20;
  fc.seed = 9;
  GnnModel a(GnnConfig{}, ds.dim(), 2, 2);
  GnnModel b(GnnConfig{}, ds.dim(), 2, 2);
  const auto ca = train_gkt(a, g, fc);
  const auto cb = train_gkt(b, g, fc);
  CHECK(ca.val_macro_f1 == cb.val_macro_f1);
  CHECK(ca.train_loss == cb.train_loss);
  REQUIRE(ca.best_epoch >= 0);
  CHECK(ca.best_val_macro_f1 == ca.val_macro_f1[static_cast<std::size_t>(ca.best_epoch)]);

  const auto pred = predict(a, g);
  std::vector<int> truth, guess;
  for (int v : ds.nodes(Domain::Target, Split::Val)) {
    truth.push_back(ds.labels[v]);
    guess.push_back(pred.label[v]);
  }
  CHECK(macro_f1(truth, guess, 2) == ca.best_val_macro_f1);
}

TEST_CASE("fully homophilous graph on Sync-UD reaches >= 0.95 target test accuracy") {
  const auto ds = assign_splits(generate_sync(sync_preset(Scenario::UD, 0)), 0.2, 0);
  Rng rng(3);
  const auto g = synth_homophily_graph(ds, 1.0, 1.0, rng);
  GnnModel m(GnnConfig{}, ds.dim(), 2, 4);
  FitConfig fc;
  fc.seed = 5;
  train_gkt(m, g, fc);
  const auto pred = predict(m, g);
  std::vector<int> truth, guess;
  for (int v : ds.nodes(Domain::Target, Split::Test)) {
    truth.push_back(ds.labels[v]);
    guess.push_back(pred.label[v]);
  }
  CHECK(accuracy(truth, guess) >= 0.95);
}

TEST_CASE("model save/load reproduces logits") {
  const auto dir = toy::scratch_dir("gkt_model");
  const auto g = six_nodes(9);
  GnnModel m(plain(2, 4, Aggregation::GcnNormalized, Combine::AggregateOnly, Activation::Relu), 3, 2, 10);
  m.save(dir);
  const auto back = GnnModel::load(dir);
  CHECK(back.config().combine == Combine::AggregateOnly);
  CHECK(bitwise_equal(gnn_forward(m, g), gnn_forward(back, g)));
  CHECK(parse_combine("aggregate") == Combine::AggregateOnly);
  CHECK_THROWS_AS(parse_aggregation("max"), ConfigError);
}

#include <benchmark/benchmark.h>

#include "bridgekit/akr/model.hpp"
#include "bridgekit/akr/retrieve.hpp"
#include "bridgekit/data/splits.hpp"
#include "bridgekit/data/synth.hpp"
#include "bridgekit/gkt/model.hpp"
#include "bridgekit/graph/bridged_graph.hpp"
#include "bridgekit/numerics/layers.hpp"
#include "bridgekit/numerics/params.hpp"

using namespace bridgekit;

namespace {

const DomainDataset& sync_ud() {
  static const DomainDataset ds = assign_splits(generate_sync(sync_preset(Scenario::UD, 0)), 0.2, 0);
  return ds;
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = standard_normal(rng);
  return m;
}

}  // namespace

// Forward and backward through one dense layer on the tape.
static void BM_TapeLinear(benchmark::State& state) {
  const auto n = state.range(0);
  ParamStore store;
  Rng rng(1);
  Linear layer(store, "l", 64, 64, rng);
  const Matrix x = random_matrix(n, 64, 2);
  for (auto _ : state) {
    store.zero_grad();
    Tape t;
    t.backward(mean_all(relu(layer.forward(t, t.constant(x)))));
    benchmark::DoNotOptimize(store.get("l.weight").grad.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_TapeLinear)->Arg(128)->Arg(900);

static void BM_EncodeSyncUD(benchmark::State& state) {
  const auto& ds = sync_ud();
  const AkrModel model(AkrConfig{}, ds.dim(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(encode(model, ds));
}
BENCHMARK(BM_EncodeSyncUD)->Unit(benchmark::kMillisecond);

static void BM_RetrieveTopK(benchmark::State& state) {
  const auto& ds = sync_ud();
  const CosineSimilarity sim = similarity_index(encode(AkrModel(AkrConfig{}, ds.dim(), 1), ds));
  for (auto _ : state) benchmark::DoNotOptimize(retrieve_topk(sim, ds.domain, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_RetrieveTopK)->Arg(8)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_GnnForward(benchmark::State& state) {
  const auto& ds = sync_ud();
  const CosineSimilarity sim = similarity_index(encode(AkrModel(AkrConfig{}, ds.dim(), 1), ds));
  const auto g = build_bridged_graph(ds, retrieve_topk(sim, ds.domain, 8), Scenario::UD, sim);
  const GnnModel model(GnnConfig{}, ds.dim(), ds.n_classes, 2);
  for (auto _ : state) benchmark::DoNotOptimize(gnn_forward(model, g));
}
BENCHMARK(BM_GnnForward)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

#include "bridgekit/eval/learners.hpp"

#include <cmath>

#include "bridgekit/error.hpp"
#include "bridgekit/eval/metrics.hpp"
#include "bridgekit/numerics/optim.hpp"
#include "bridgekit/parallel.hpp"

namespace bridgekit {

namespace {

std::vector<int> labeled_nodes(const DomainDataset& ds, Domain d, Split s) {
  std::vector<int> out;
  for (int v : ds.nodes(d, s)) {
    if (ds.labels[static_cast<std::size_t>(v)] != kUnlabeled) out.push_back(v);
  }
  return out;
}

std::vector<int> dense_labels(const DomainDataset& ds) {
  std::vector<int> y = ds.labels;
  for (int& v : y) v = v == kUnlabeled ? 0 : v;
  return y;
}

std::vector<int> dims_of(const DnnConfig& c, int in, int out) {
  std::vector<int> dims{in};
  for (int l = 0; l + 1 < c.layers; ++l) dims.push_back(c.hidden);
  dims.push_back(out);
  return dims;
}

struct TrainedDnn {
  ParamStore store;
  Mlp mlp;
};

std::unique_ptr<TrainedDnn> fit_dnn(const DomainDataset& ds, DnnStrategy strategy, const DnnConfig& config,
                                    std::uint64_t seed) {
  config.validate();
  auto net = std::make_unique<TrainedDnn>();
  Rng init = make_rng(seed, 0xd11);
  net->mlp = Mlp(net->store, "dnn", dims_of(config, ds.dim(), ds.n_classes), config.activation, init);
  const auto labels = dense_labels(ds);
  const auto source = labeled_nodes(ds, Domain::Source, Split::Train);
  const auto target = labeled_nodes(ds, Domain::Target, Split::Train);
  const auto val = labeled_nodes(ds, Domain::Target, Split::Val);
  const Mlp& mlp = net->mlp;
  auto logits = [&](Tape& tape, Rng* rng) { return mlp.forward(tape, tape.constant(ds.features), config.dropout, rng); };
  FitConfig fit = config.fit;
  fit.seed = derive_seed(seed, 1);
  switch (strategy) {
    case DnnStrategy::TargetOnly:
      fit_classifier(net->store, logits, labels, target, val, ds.n_classes, fit);
      break;
    case DnnStrategy::Joint: {
      std::vector<int> all = source;
      all.insert(all.end(), target.begin(), target.end());
      fit_classifier(net->store, logits, labels, all, val, ds.n_classes, fit);
      break;
    }
    case DnnStrategy::PretrainFinetune:
      fit_classifier(net->store, logits, labels, source, val, ds.n_classes, fit);
      fit.seed = derive_seed(seed, 2);
      fit_classifier(net->store, logits, labels, target, val, ds.n_classes, fit);
      break;
  }
  return net;
}

Matrix eval_logits(const TrainedDnn& net, const Matrix& x) {
  Tape tape;
  return net.mlp.forward(tape, tape.constant(x)).value();
}

}  // namespace

void DnnConfig::validate() const {
  if (layers < 1) throw ConfigError("dnn: layers must be >= 1");
  if (hidden < 1) throw ConfigError("dnn: hidden must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dnn: dropout must lie in [0, 1)");
  fit.validate();
}

std::string to_string(DnnStrategy s) {
  switch (s) {
    case DnnStrategy::TargetOnly: return "DNN_T";
    case DnnStrategy::Joint: return "DNN_S+T";
    case DnnStrategy::PretrainFinetune: return "DNN_S->T";
  }
  return "DNN";
}

Predictions dnn_predict(const DomainDataset& ds, DnnStrategy strategy, const DnnConfig& config, std::uint64_t seed) {
  auto net = fit_dnn(ds, strategy, config, seed);
  return predict_from_logits(eval_logits(*net, ds.features));
}

Matrix dnn_logits(const DomainDataset& ds, const DnnConfig& config, std::uint64_t seed) {
  auto net = fit_dnn(ds, DnnStrategy::Joint, config, seed);
  return eval_logits(*net, ds.features);
}

std::unique_ptr<PairSimilarity> raw_feature_similarity(const DomainDataset& ds) {
  return std::make_unique<CosineSimilarity>(ds.features);
}

std::unique_ptr<PairSimilarity> pointwise_similarity(const DomainDataset& ds, const DnnConfig& config,
                                                     std::uint64_t seed) {
  return std::make_unique<CosineSimilarity>(dnn_logits(ds, config, seed));
}

std::unique_ptr<PairSimilarity> pairwise_similarity(const DomainDataset& ds, const AkrTrainConfig& pairs, int hidden,
                                                    std::uint64_t seed) {
  pairs.validate();
  ParamStore store;
  Rng init = make_rng(seed, 0x9a1);
  const int d = ds.dim();
  Mlp mlp(store, "pair", {2 * d, hidden, hidden, 1}, Activation::Relu, init);
  Rng rng = make_rng(seed, 0x9a2);
  OptimizerConfig opt;
  opt.lr = pairs.lr;
  opt.weight_decay = pairs.weight_decay;
  for (int epoch = 0; epoch < pairs.epochs; ++epoch) {
    const auto batches = sample_epoch(ds, pairs.n_pair, pairs.max_class_num, rng);
    std::vector<int> a, b;
    std::vector<double> y;
    for (const auto& batch : batches) {
      for (const auto& p : batch.pairs) {
        a.push_back(p.a);
        b.push_back(p.b);
        y.push_back(p.label);
      }
    }
    Tape tape;
    Var x = tape.constant(ds.features);
    Var logits = mlp.forward(tape, concat_cols(gather_rows(x, a), gather_rows(x, b)));
    Var loss = bce_with_logits(logits, y);
    if (!std::isfinite(loss.scalar())) throw NumericalError("pairwise learner: non-finite loss at epoch " + std::to_string(epoch));
    tape.backward(loss);
    optimizer_step(store, opt);
  }
  const int n = ds.size();
  Matrix prob(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    Matrix in(n, 2 * d);
    in.leftCols(d) = ds.features.row(static_cast<Eigen::Index>(i)).replicate(n, 1);
    in.rightCols(d) = ds.features;
    Tape tape;
    const Matrix z = mlp.forward(tape, tape.constant(std::move(in))).value();
    for (int j = 0; j < n; ++j) prob(static_cast<Eigen::Index>(i), j) = 1.0 / (1.0 + std::exp(-z(j, 0)));
  });
  return std::make_unique<DenseSimilarity>(std::move(prob), 0.5);
}

HeldOutPairs held_out_pairs(const DomainDataset& ds, int n_pair, int max_class_num, std::uint64_t seed) {
  std::vector<int> held;
  for (int v : ds.nodes(Domain::Target)) {
    const auto s = ds.split[static_cast<std::size_t>(v)];
    if ((s == Split::Val || s == Split::Test) && ds.labels[static_cast<std::size_t>(v)] != kUnlabeled) held.push_back(v);
  }
  if (held.empty()) throw DataError("no held-out target nodes for pair evaluation");
  const auto held_view = LabeledView::of(ds, held);
  const auto src_view = LabeledView::of(ds, labeled_nodes(ds, Domain::Source, Split::Train));
  Rng rng = make_rng(seed, 0xe7a1);
  HeldOutPairs out;
  out.intra = bps_sample(held_view, held_view, n_pair, max_class_num, rng, PairProvenance::TgtTgt);
  out.inter = bps_sample(src_view, held_view, n_pair, max_class_num, rng, PairProvenance::SrcTgt);
  // A node paired with itself says nothing about the learner.
  std::erase_if(out.intra.pairs, [](const SamplePair& p) { return p.a == p.b; });
  return out;
}

double pair_macro_f1(const PairSimilarity& sim, const PairBatch& batch) {
  std::vector<int> truth, pred;
  truth.reserve(batch.pairs.size());
  pred.reserve(batch.pairs.size());
  for (const auto& p : batch.pairs) {
    truth.push_back(p.label);
    pred.push_back(sim.at(p.a, p.b) >= sim.decision_threshold() ? 1 : 0);
  }
  return macro_f1(truth, pred, 2);
}

}  // namespace bridgekit

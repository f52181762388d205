#include "bridgekit/sampler/bps.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "bridgekit/error.hpp"

namespace bridgekit {

std::string to_string(PairProvenance p) {
  switch (p) {
    case PairProvenance::SrcSrc: return "src-src";
    case PairProvenance::TgtTgt: return "tgt-tgt";
    case PairProvenance::SrcTgt: return "src-tgt";
  }
  return "src-src";
}

int PairBatch::positives() const {
  return static_cast<int>(std::count_if(pairs.begin(), pairs.end(), [](const SamplePair& p) { return p.label == 1; }));
}

int PairBatch::negatives() const { return static_cast<int>(pairs.size()) - positives(); }

LabeledView LabeledView::of(const DomainDataset& ds, const std::vector<int>& nodes) {
  LabeledView v;
  for (int i : nodes) {
    if (ds.labels[i] == kUnlabeled) throw DataError("labeled view: node " + std::to_string(i) + " has no label");
    v.nodes.push_back(i);
    v.labels.push_back(ds.labels[i]);
  }
  return v;
}

PairBatch bps_sample(const LabeledView& first, const LabeledView& second, int n_pair, int max_class_num, Rng& rng,
                     PairProvenance provenance) {
  if (first.nodes.empty() || second.nodes.empty()) throw DataError("bps_sample: empty labeled view");
  if (n_pair <= 0 || max_class_num <= 0) throw ConfigError("bps_sample: n_pair and max_class_num must be positive");

  std::map<int, std::vector<int>> pool1, pool2;
  for (std::size_t k = 0; k < first.nodes.size(); ++k) pool1[first.labels[k]].push_back(first.nodes[k]);
  for (std::size_t k = 0; k < second.nodes.size(); ++k) pool2[second.labels[k]].push_back(second.nodes[k]);
  std::set<int> class_set;
  for (const auto& [c, _] : pool1) class_set.insert(c);
  for (const auto& [c, _] : pool2) class_set.insert(c);

  std::vector<int> classes(class_set.begin(), class_set.end());
  shuffle(classes, rng);
  const int m = std::min<int>(max_class_num, static_cast<int>(classes.size()));
  classes.resize(static_cast<std::size_t>(m));
  std::sort(classes.begin(), classes.end());
  for (int c : classes) {
    if (!pool1.contains(c)) throw DataError("bps_sample: class " + std::to_string(c) + " is empty in the first view");
    if (!pool2.contains(c)) throw DataError("bps_sample: class " + std::to_string(c) + " is empty in the second view");
  }

  const double half = 0.5 * n_pair;
  const int n_same = static_cast<int>(half / m);
  const int n_cross = m > 1 ? static_cast<int>(half / (m * (m - 1))) : 0;

  PairBatch batch;
  batch.provenance = provenance;
  for (int from : classes) {
    const auto& p1 = pool1[from];
    for (int to : classes) {
      const auto& p2 = pool2[to];
      const int n_batch = from == to ? n_same : n_cross;
      for (int k = 0; k < n_batch; ++k) {
        const int a = p1[uniform_index(rng, p1.size())];
        const int b = p2[uniform_index(rng, p2.size())];
        batch.pairs.push_back(SamplePair{a, b, from == to ? 1 : 0});
      }
    }
  }
  return batch;
}

std::array<PairBatch, 3> sample_epoch(const DomainDataset& ds, int n_pair, int max_class_num, Rng& rng) {
  const auto source = ds.nodes(Domain::Source);
  const auto target = ds.nodes(Domain::Target, Split::Train);
  if (source.empty()) throw DataError("sample_epoch: no labeled source samples");
  if (target.empty()) throw DataError("sample_epoch: target train set is empty");
  const LabeledView src = LabeledView::of(ds, source);
  const LabeledView tgt = LabeledView::of(ds, target);
  return {bps_sample(src, src, n_pair, max_class_num, rng, PairProvenance::SrcSrc),
          bps_sample(tgt, tgt, n_pair, max_class_num, rng, PairProvenance::TgtTgt),
          bps_sample(src, tgt, n_pair, max_class_num, rng, PairProvenance::SrcTgt)};
}

}  // namespace bridgekit

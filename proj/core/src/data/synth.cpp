#include "bridgekit/data/synth.hpp"

#include <cmath>
#include <set>
#include <string>

#include "bridgekit/error.hpp"
#include "bridgekit/rng.hpp"

namespace bridgekit {

namespace {

RowVector random_unit(int dim, Rng& rng) {
  RowVector v(dim);
  do {
    for (int k = 0; k < dim; ++k) v(k) = standard_normal(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

void add_intra_edges(DomainDataset& ds, const std::vector<int>& members, double p_same, double p_cross, Rng& rng) {
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      const int i = members[a];
      const int j = members[b];
      const double p = ds.labels[i] == ds.labels[j] ? p_same : p_cross;
      if (uniform01(rng) < p) ds.edges.emplace_back(i, j);
    }
  }
}

}  // namespace

void SyncConfig::validate() const {
  if (n_src <= 0 || n_tgt <= 0 || dim <= 0 || n_classes <= 0) {
    throw ConfigError("synthetic config: n_src, n_tgt, dim and n_classes must be positive");
  }
  if (n_classes > dim) throw ConfigError("synthetic config: n_classes must not exceed dim");
  if (edge_prob_intra < 0.0 || edge_prob_intra > 1.0) throw ConfigError("synthetic config: edge_prob_intra must be in [0,1]");
  if (homophily_bias < 1.0) throw ConfigError("synthetic config: homophily_bias must be >= 1");
  if (n_inter_edges < 0) throw ConfigError("synthetic config: n_inter_edges must be >= 0");
  if (class_sep < 0.0 || marginal_shift < 0.0 || conditional_shift < 0.0) {
    throw ConfigError("synthetic config: separations and shifts must be non-negative");
  }
  if (conditional_shift > 0.0) {
    if (dim < 2 * n_classes) throw ConfigError("synthetic config: conditional_shift needs dim >= 2 * n_classes");
    const double reach = 2.0 * class_sep * std::sqrt(1.0 - 1.0 / n_classes);
    if (conditional_shift > reach) {
      throw ConfigError("synthetic config: conditional_shift exceeds 2 * class_sep * sqrt(1 - 1/n_classes)");
    }
  }
}

SyncConfig sync_preset(Scenario scenario, std::uint64_t seed) {
  SyncConfig c;
  c.scenario = scenario;
  c.seed = seed;
  return c;
}

SyncMeans sync_class_means(const SyncConfig& config, Rng& rng) {
  const int d = config.dim;
  const int c_count = config.n_classes;
  // Target class means are the source means rotated about their centroid:
  // each class direction e_c tilts by angle phi toward its own random unit
  // vector q_c, orthogonal to every class direction and to the other q's.
  // Every class mean moves by 2 rho sin(phi / 2) = conditional_shift, class
  // separability is preserved, and the optimal decision boundary turns.
  SyncMeans m;
  auto& source_means = m.source;
  auto& target_means = m.target;
  source_means.resize(static_cast<std::size_t>(c_count));
  target_means.resize(static_cast<std::size_t>(c_count));
  RowVector centroid = RowVector::Zero(d);
  for (int c = 0; c < c_count; ++c) {
    source_means[c] = RowVector::Zero(d);
    source_means[c](c) = config.class_sep;
    centroid(c) = config.class_sep / c_count;
  }
  const RowVector marginal = random_unit(d, rng) * config.marginal_shift;
  const double rho = config.class_sep * std::sqrt(1.0 - 1.0 / c_count);
  const double phi = config.conditional_shift > 0.0 ? 2.0 * std::asin(config.conditional_shift / (2.0 * rho)) : 0.0;
  std::vector<RowVector> partners;
  for (int c = 0; c < c_count && phi > 0.0; ++c) {
    RowVector q;
    do {
      q = random_unit(d, rng);
      q.head(c_count).setZero();
      for (const auto& p : partners) q -= q.dot(p) * p;
    } while (q.norm() < 1e-6);
    partners.push_back(q / q.norm());
  }
  for (int c = 0; c < c_count; ++c) {
    const RowVector offset = source_means[c] - centroid;
    RowVector rotated = offset;
    for (int k = 0; k < c_count && phi > 0.0; ++k) {
      rotated(k) -= (1.0 - std::cos(phi)) * offset(k);
      rotated += std::sin(phi) * offset(k) * partners[k];
    }
    target_means[c] = centroid + rotated + marginal;
  }
  return m;
}

SyncMeans sync_class_means(const SyncConfig& config) {
  config.validate();
  Rng rng = make_rng(config.seed, 0x5ea1);
  return sync_class_means(config, rng);
}

DomainDataset generate_sync(const SyncConfig& config) {
  config.validate();
  Rng rng = make_rng(config.seed, 0x5ea1);
  const int n = config.n_src + config.n_tgt;
  const int d = config.dim;
  const int c_count = config.n_classes;

  const SyncMeans means = sync_class_means(config, rng);
  const auto& source_means = means.source;
  const auto& target_means = means.target;

  DomainDataset ds;
  ds.n_classes = c_count;
  ds.features.resize(n, d);
  ds.labels.resize(n);
  ds.domain.resize(n);
  ds.split.assign(n, Split::Unassigned);
  for (int i = 0; i < n; ++i) {
    const bool source = i < config.n_src;
    const int local = source ? i : i - config.n_src;
    const int c = local % c_count;
    ds.labels[i] = c;
    ds.domain[i] = source ? Domain::Source : Domain::Target;
    const RowVector& mean = source ? source_means[c] : target_means[c];
    for (int k = 0; k < d; ++k) ds.features(i, k) = mean(k) + standard_normal(rng);
  }

  if (config.scenario != Scenario::UD) {
    const double p_same = config.edge_prob_intra;
    const double p_cross = config.edge_prob_intra / config.homophily_bias;
    add_intra_edges(ds, ds.nodes(Domain::Source), p_same, p_cross, rng);
    add_intra_edges(ds, ds.nodes(Domain::Target), p_same, p_cross, rng);
  }
  if (config.scenario == Scenario::RDIntraInter && config.n_inter_edges > 0) {
    const auto max_pairs = static_cast<long long>(config.n_src) * config.n_tgt;
    if (config.n_inter_edges > max_pairs) throw ConfigError("synthetic config: more inter-domain edges than pairs");
    std::set<Edge> chosen;
    const double accept_cross = 1.0 / config.homophily_bias;
    while (static_cast<int>(chosen.size()) < config.n_inter_edges) {
      const int s = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(config.n_src)));
      const int t = config.n_src + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(config.n_tgt)));
      const double accept = ds.labels[s] == ds.labels[t] ? 1.0 : accept_cross;
      if (uniform01(rng) < accept) chosen.emplace(s, t);
    }
    ds.edges.insert(ds.edges.end(), chosen.begin(), chosen.end());
  }
  ds.validate();
  return ds;
}

}  // namespace bridgekit

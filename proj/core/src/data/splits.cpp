#include "bridgekit/data/splits.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "bridgekit/error.hpp"
#include "bridgekit/rng.hpp"

namespace bridgekit {

DomainDataset assign_splits(DomainDataset ds, double target_train_frac, std::uint64_t seed) {
  if (!(target_train_frac > 0.0 && target_train_frac < 1.0)) {
    throw ConfigError("target_train_frac must be in (0, 1)");
  }
  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(ds.n_classes));
  for (int i = 0; i < ds.size(); ++i) {
    if (ds.domain[i] == Domain::Source) {
      ds.split[i] = Split::Train;
      continue;
    }
    if (ds.labels[i] == kUnlabeled) {
      throw DataError("assign_splits: target sample " + std::to_string(i) + " is unlabeled; stratification needs labels");
    }
    by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
  }
  Rng rng = make_rng(seed, 0x5b117);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    if (members.empty()) continue;
    if (members.size() < 3) {
      throw DataError("assign_splits: target class " + std::to_string(c) + " has only " +
                      std::to_string(members.size()) + " samples (need >= 3)");
    }
    shuffle(members, rng);
    const auto n_c = members.size();
    // Guard against 0.2 * 5 landing a hair under 1.
    const auto n_train = static_cast<std::size_t>(std::floor(target_train_frac * static_cast<double>(n_c) + 1e-9));
    const std::size_t rest = n_c - n_train;
    const std::size_t n_val = (rest + 1) / 2;
    for (std::size_t k = 0; k < n_c; ++k) {
      Split s = k < n_train ? Split::Train : (k < n_train + n_val ? Split::Val : Split::Test);
      ds.split[static_cast<std::size_t>(members[k])] = s;
    }
  }
  return ds;
}

}  // namespace bridgekit

#pragma once

#include <cstdint>

#include "bridgekit/data/dataset.hpp"

namespace bridgekit {

/// Semi-supervised split protocol: every source sample goes to Train. Within
/// each target class of size n_c, floor(frac * n_c) samples go to Train and the
/// remainder r is split ceil(r/2) Val / floor(r/2) Test. Seeded and stratified.
/// Throws DataError when a target sample is unlabeled or a target class has
/// fewer than 3 samples; ConfigError when frac is outside (0, 1).
DomainDataset assign_splits(DomainDataset ds, double target_train_frac, std::uint64_t seed);

}  // namespace bridgekit

// Chain-versus-enumeration comparisons shared by the unit and acceptance
// suites.
#pragma once

#include <cstdint>

#include "mnsbm/graph_io.hpp"
#include "mnsbm/sbm_kernel.hpp"

namespace mnsbm::testing {

// Total variation between the S = 1 chain's partition frequencies (every
// other sweep after a burn-in of 1000) and the enumerated posterior, with
// hyperparameters held at `hp`.
double single_network_tv(const ObservedGraph& g, const Hyperparams& hp, int samples,
                         std::uint64_t seed);

struct JointCheck {
  double tv = 0.0;
  double kept_fraction = 0.0;  // share of samples with every count <= cap
};

// S = 2 on the path 0-1-2: joint law of both partitions and the four
// per-subnetwork link counts, compared conditional on counts <= 3.
JointCheck two_network_path_tv(const Hyperparams& hp, int samples, std::uint64_t seed);

}  // namespace mnsbm::testing

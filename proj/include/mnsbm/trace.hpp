#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mnsbm/graph_io.hpp"
#include "mnsbm/sbm_kernel.hpp"

namespace mnsbm {

// One retained MCMC state.
struct ChainRecord {
  std::size_t iteration = 0;
  double log_density = 0.0;
  std::vector<std::vector<std::uint32_t>> assignments;  // [s][vertex]
  std::vector<Hyperparams> hyperparams;                 // [s]
  std::vector<std::uint32_t> imputed_totals;            // [held-out dyad]
  std::vector<std::uint32_t> counts;                    // [count dyad * S + s], optional

  std::size_t block_count(std::size_t s) const;

  friend bool operator==(const ChainRecord&, const ChainRecord&) = default;
};

struct ChainTrace {
  std::size_t n = 0;
  std::size_t S = 0;
  std::size_t iterations = 0;
  std::size_t burn_in = 0;
  std::size_t thinning = 1;
  std::uint64_t master_seed = 0;
  std::string manifest;                // path of the run manifest, may be empty
  std::vector<LabeledDyad> heldout;
  std::vector<Dyad> count_dyads;       // dyads whose per-subnetwork counts are recorded
  std::vector<ChainRecord> records;

  // Number of records a run of `iterations` sweeps retains.
  static std::size_t expected_records(std::size_t iterations, std::size_t burn_in,
                                      std::size_t thinning);
  bool retains(std::size_t iteration) const {
    return iteration >= burn_in && (iteration - burn_in) % thinning == 0;
  }
  // Mean block count over records and subnetworks.
  double mean_block_count() const;

  friend bool operator==(const ChainTrace&, const ChainTrace&) = default;
};

}  // namespace mnsbm

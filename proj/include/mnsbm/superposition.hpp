#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mnsbm/graph_io.hpp"
#include "mnsbm/rng.hpp"
#include "mnsbm/sbm_kernel.hpp"
#include "mnsbm/trace.hpp"

namespace mnsbm {

// Dyads per edge-resampling work unit. Each unit draws from its own stream,
// so the value fixes the random sequence and must not depend on workers.
inline constexpr std::size_t kDyadBlockSize = 1024;

// Lower bound applied to block rates when they enter a dyad's total rate.
inline constexpr double kRateFloor = 1e-12;

struct SubnetworkState {
  Assignment z;
  BlockStats stats;
  RateMatrix eta;
  Hyperparams hp;
  std::uint64_t stream_id = 0;  // identity used to derive this subnetwork's streams

  friend bool operator==(const SubnetworkState&, const SubnetworkState&) = default;
};

// S latent subnetworks and the per-dyad latent counts. Only dyads that can
// carry a count are stored: observed training links (constrained to a
// positive total) followed by held-out dyads (imputed, unconstrained). Every
// other dyad is an observed non-link whose counts are all zero.
struct EnsembleState {
  std::size_t n = 0;
  std::vector<Dyad> dyads;
  std::size_t constrained = 0;         // dyads[0, constrained) are training links
  Adjacency support;
  std::vector<std::uint32_t> counts;   // [dyad * S + s]
  std::vector<SubnetworkState> subs;

  std::size_t S() const { return subs.size(); }
  std::size_t heldout_count() const { return dyads.size() - constrained; }
  LayerView layer(std::size_t s) const {
    return LayerView{&support, nullptr, counts, subs.size(), s};
  }
  std::uint32_t total(std::size_t d) const;

  friend bool operator==(const EnsembleState& a, const EnsembleState& b) {
    return a.n == b.n && a.dyads == b.dyads && a.constrained == b.constrained &&
           a.counts == b.counts && a.subs == b.subs;
  }
};

// Coordinates of one sweep: together with the master seed they name every
// random stream the sweep consumes.
struct SweepContext {
  std::uint64_t master_seed = 1;
  std::uint64_t iteration = 0;
  int workers = 1;
  bool sample_hyperparams = true;
  double mh_step = 0.1;
};

struct SweepConfig {
  std::size_t iterations = 6000;
  std::size_t burn_in = 3000;
  std::size_t thinning = 10;
  std::uint64_t master_seed = 1;
  int parallel_workers = 1;
  // When set, hyperparameters start here and are never resampled.
  std::optional<Hyperparams> fixed_hyperparams;
  bool record_counts = false;
  double mh_step = 0.1;

  void validate() const;
};

// Builds the dyad layout with all counts zero and empty subnetworks.
EnsembleState make_ensemble(const ObservedGraph& train, const HeldoutSet& heldout,
                            std::size_t S);

// Random start: CRP(1) assignments, each training link given a single
// count in a uniformly chosen subnetwork, held-out counts zero.
void initialize_ensemble(EnsembleState& ens, std::uint64_t master_seed,
                         const Hyperparams& hp = {});

// Sum over subnetworks of the (floored) block rate of dyad (i, j).
double total_rate(const EnsembleState& ens, Dyad d);

// Fills `out[s]` with subnetwork s's floored rate on dyad (i, j).
void subnetwork_rates(const EnsembleState& ens, Dyad d, std::span<double> out);

// Total latent count of one dyad: zero for a non-link, zero-truncated
// Poisson(eta) for a link.
std::uint32_t sample_total_count(int a_star, double eta, Rng& rng);

// Multinomial(total, rates / sum(rates)) via sequential binomials.
void split_count(std::uint32_t total, std::span<const double> rates, Rng& rng,
                 std::span<std::uint32_t> out);
std::vector<std::uint32_t> split_count(std::uint32_t total, std::span<const double> rates,
                                       Rng& rng);

// Redraws totals and splits for dyads [first, last): truncated for training
// links, plain Poisson for held-out dyads. Block statistics are rebuilt.
void resample_dyads(EnsembleState& ens, std::size_t first, std::size_t last,
                    const SweepContext& ctx);

// resample_dyads over every stored dyad.
void resample_edges(EnsembleState& ens, const SweepContext& ctx);

// eta -> edges (+ imputation) -> z -> hyperparameters, parallel per phase.
void full_sweep(EnsembleState& ens, const SweepContext& ctx);

// Sum over subnetworks of CRP + collapsed likelihood + hyperparameter priors.
double joint_log_density(const EnsembleState& ens);

// Empty string when every ensemble invariant holds, else a description.
std::string check_invariants(const EnsembleState& ens);

// Initialises, runs cfg.iterations sweeps and records retained states.
// Setting *cancel stops between sweeps with a truncated trace.
ChainTrace run_chain(const ObservedGraph& train, const HeldoutSet& heldout, std::size_t S,
                     const SweepConfig& cfg, const std::atomic<bool>* cancel = nullptr);

namespace reference {

// Serial implementations kept as the oracle for the parallel kernels. They
// consume the same streams and must produce bit-identical states.
void resample_edges(EnsembleState& ens, const SweepContext& ctx);
void full_sweep(EnsembleState& ens, const SweepContext& ctx);

}  // namespace reference

}  // namespace mnsbm

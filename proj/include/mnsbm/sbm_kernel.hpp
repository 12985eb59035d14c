#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mnsbm/block_matrix.hpp"
#include "mnsbm/graph_io.hpp"
#include "mnsbm/rng.hpp"

namespace mnsbm {

// Block labels of every vertex plus block occupancies. Labels are always
// compact: every label in 0..L-1 is occupied.
struct Assignment {
  std::vector<std::uint32_t> z;
  std::vector<std::uint32_t> sizes;

  std::size_t n() const { return z.size(); }
  std::size_t block_count() const { return sizes.size(); }

  // Relabels arbitrary labels to 0..L-1 in order of first appearance.
  static Assignment from_labels(std::span<const std::uint32_t> labels);
  bool valid() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct Hyperparams {
  double alpha = 2.0;   // CRP concentration
  double kappa = 2.0;   // Gamma shape of block rates
  double lambda = 2.0;  // Gamma rate of block rates

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

// N: summed latent counts per block pair. M: number of modelled dyads per
// block pair.
struct BlockStats {
  BlockMatrix<std::int64_t> edges;
  BlockMatrix<std::int64_t> dyads;

  friend bool operator==(const BlockStats&, const BlockStats&) = default;
};

using RateMatrix = BlockMatrix<double>;

// Per-vertex incidence lists over a dyad list; entry.dyad indexes the list.
struct Adjacency {
  struct Entry {
    Vertex other;
    std::uint32_t dyad;
  };

  std::vector<std::size_t> offsets;  // n + 1
  std::vector<Entry> entries;

  static Adjacency build(std::size_t n, std::span<const Dyad> dyads);
  std::size_t n() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::span<const Entry> of(Vertex v) const {
    return {entries.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
};

// One subnetwork's latent counts: count(d) is the value on dyad d of the
// support list. Dyads absent from the support carry count 0. Dyads in
// `excluded` are not modelled at all (they leave M and N); the support and
// the excluded set must be disjoint.
struct LayerView {
  const Adjacency* support = nullptr;
  const Adjacency* excluded = nullptr;
  std::span<const std::uint32_t> counts;
  std::size_t stride = 1;
  std::size_t offset = 0;

  std::uint32_t count(std::size_t d) const { return counts[d * stride + offset]; }
};

// log p(z | alpha) under the Chinese restaurant process.
double crp_log_density(const Assignment& z, double alpha);

// Sequential seating draw from the CRP.
Assignment sample_crp(std::size_t n, double alpha, Rng& rng);

BlockStats block_stats(const Assignment& z, const LayerView& layer);

// Sum over block pairs l <= m of the Gamma-Poisson marginal, without the
// z-independent -sum log(count!) term.
double block_log_marginal(const BlockStats& stats, double kappa, double lambda);

// log p(counts | z, kappa, lambda) with block rates integrated out.
double collapsed_log_likelihood(const BlockStats& stats, const LayerView& layer, double kappa,
                                double lambda);

// One systematic-scan collapsed Gibbs sweep over all vertices. `stats` must
// match block_stats(z, layer) on entry and does again on exit.
void gibbs_sweep_z(Assignment& z, BlockStats& stats, const LayerView& layer,
                   const Hyperparams& hp, Rng& rng);

// Draws every block rate from its Gamma(N + kappa, M + lambda) conditional.
RateMatrix sample_eta(const BlockStats& stats, double kappa, double lambda, Rng& rng);

// log of the MH acceptance ratio for a log-space random-walk proposal,
// including the Jacobian theta'/theta.
inline double mh_log_acceptance(double log_target, double log_target_proposed, double theta,
                                double theta_proposed) {
  return (log_target_proposed + std::log(theta_proposed)) - (log_target + std::log(theta));
}

// One random-walk Metropolis-Hastings step in log coordinates for each of
// alpha, kappa and lambda in turn, under independent Gamma(2, 1) priors.
Hyperparams mh_update_hyperparams(const Hyperparams& hp, const Assignment& z,
                                  const BlockStats& stats, Rng& rng, double step = 0.1);

}  // namespace mnsbm


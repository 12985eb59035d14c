#include "mnsbm/sbm_kernel.hpp"

#include <algorithm>
#include <unordered_map>

#include "mnsbm/errors.hpp"
#include "mnsbm/math.hpp"

namespace mnsbm {

Assignment Assignment::from_labels(std::span<const std::uint32_t> labels) {
  Assignment a;
  a.z.reserve(labels.size());
  std::unordered_map<std::uint32_t, std::uint32_t> compact;
  for (std::uint32_t label : labels) {
    auto [it, inserted] = compact.try_emplace(label, static_cast<std::uint32_t>(compact.size()));
    if (inserted) a.sizes.push_back(0);
    a.z.push_back(it->second);
    ++a.sizes[it->second];
  }
  return a;
}

bool Assignment::valid() const {
  std::vector<std::uint32_t> seen(sizes.size(), 0);
  for (std::uint32_t label : z) {
    if (label >= sizes.size()) return false;
    ++seen[label];
  }
  return seen == sizes && std::find(sizes.begin(), sizes.end(), 0u) == sizes.end();
}

Adjacency Adjacency::build(std::size_t n, std::span<const Dyad> dyads) {
  Adjacency adj;
  adj.offsets.assign(n + 1, 0);
  for (const Dyad& d : dyads) {
    ++adj.offsets[d.i + 1];
    ++adj.offsets[d.j + 1];
  }
  for (std::size_t v = 0; v < n; ++v) adj.offsets[v + 1] += adj.offsets[v];
  adj.entries.resize(adj.offsets[n]);
  std::vector<std::size_t> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
  for (std::size_t k = 0; k < dyads.size(); ++k) {
    const Dyad& d = dyads[k];
    const auto idx = static_cast<std::uint32_t>(k);
    adj.entries[cursor[d.i]++] = {d.j, idx};
    adj.entries[cursor[d.j]++] = {d.i, idx};
  }
  return adj;
}

double crp_log_density(const Assignment& z, double alpha) {
  if (!(alpha > 0.0)) throw ArgumentError("CRP concentration must be positive");
  const auto n = static_cast<double>(z.n());
  double value = static_cast<double>(z.block_count()) * std::log(alpha) + log_gamma(alpha) -
                 log_gamma(n + alpha);
  for (std::uint32_t size : z.sizes) value += log_gamma(static_cast<double>(size));
  return value;
}

Assignment sample_crp(std::size_t n, double alpha, Rng& rng) {
  if (n == 0) throw ArgumentError("CRP needs at least one vertex");
  if (!(alpha > 0.0)) throw ArgumentError("CRP concentration must be positive");
  Assignment a;
  a.z.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = std::uniform_real_distribution<double>(0.0, static_cast<double>(i) + alpha)(rng);
    std::uint32_t label = 0;
    for (; label < a.sizes.size(); ++label) {
      u -= a.sizes[label];
      if (u < 0.0) break;
    }
    if (label == a.sizes.size()) a.sizes.push_back(0);
    ++a.sizes[label];
    a.z.push_back(label);
  }
  return a;
}

namespace {

bool is_excluded(const LayerView& layer, Vertex i, Vertex j) {
  if (layer.excluded == nullptr) return false;
  const auto partners = layer.excluded->of(i);
  return std::any_of(partners.begin(), partners.end(),
                     [j](const Adjacency::Entry& e) { return e.other == j; });
}

void check_rate_prior(double kappa, double lambda) {
  if (!(kappa > 0.0)) throw ArgumentError("Gamma shape kappa must be positive");
  if (!(lambda > 0.0)) throw ArgumentError("Gamma rate lambda must be positive");
}

}  // namespace

BlockStats block_stats(const Assignment& z, const LayerView& layer) {
  const std::size_t L = z.block_count();
  BlockStats stats{BlockMatrix<std::int64_t>(L), BlockMatrix<std::int64_t>(L)};
  for (std::size_t l = 0; l < L; ++l) {
    const auto nl = static_cast<std::int64_t>(z.sizes[l]);
    stats.dyads.set(l, l, nl * (nl - 1) / 2);
    for (std::size_t m = l + 1; m < L; ++m)
      stats.dyads.set(l, m, nl * static_cast<std::int64_t>(z.sizes[m]));
  }
  if (layer.excluded != nullptr) {
    for (Vertex i = 0; i < z.n(); ++i)
      for (const auto& e : layer.excluded->of(i))
        if (e.other > i) stats.dyads.add(z.z[i], z.z[e.other], -1);
  }
  if (layer.support != nullptr) {
    for (Vertex i = 0; i < z.n(); ++i)
      for (const auto& e : layer.support->of(i))
        if (e.other > i && !is_excluded(layer, i, e.other))
          stats.edges.add(z.z[i], z.z[e.other], layer.count(e.dyad));
  }
  return stats;
}

double block_log_marginal(const BlockStats& stats, double kappa, double lambda) {
  check_rate_prior(kappa, lambda);
  const double prior_term = kappa * std::log(lambda) - log_gamma(kappa);
  const std::size_t L = stats.edges.size();
  double value = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t m = l; m < L; ++m) {
      const double N = static_cast<double>(stats.edges(l, m)) + kappa;
      const double M = static_cast<double>(stats.dyads(l, m)) + lambda;
      value += prior_term + log_gamma(N) - N * std::log(M);
    }
  }
  return value;
}

double collapsed_log_likelihood(const BlockStats& stats, const LayerView& layer, double kappa,
                                double lambda) {
  double value = block_log_marginal(stats, kappa, lambda);
  if (layer.support != nullptr) {
    for (Vertex i = 0; i < layer.support->n(); ++i)
      for (const auto& e : layer.support->of(i))
        if (e.other > i && !is_excluded(layer, i, e.other))
          value -= log_gamma(static_cast<double>(layer.count(e.dyad)) + 1.0);
  }
  return value;
}

void gibbs_sweep_z(Assignment& z, BlockStats& stats, const LayerView& layer,
                   const Hyperparams& hp, Rng& rng) {
  const std::size_t n = z.n();
  if (n <= 1) return;
  const double kappa = hp.kappa;
  const double lambda = hp.lambda;
  const double log_alpha = std::log(hp.alpha);
  const auto pair_term = [kappa, lambda](std::int64_t N, std::int64_t M) {
    const double shape = static_cast<double>(N) + kappa;
    return log_gamma(shape) - shape * std::log(static_cast<double>(M) + lambda);
  };
  const double empty_term = pair_term(0, 0);

  auto& edges = stats.edges;
  auto& dyads = stats.dyads;
  std::size_t L = z.block_count();

  // cache of pair_term(N_lm, M_lm), kept in step with the stats
  BlockMatrix<double> cached(L);
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t m = l; m < L; ++m) cached.set(l, m, pair_term(edges(l, m), dyads(l, m)));

  std::vector<std::int64_t> to_block;   // latent count from i into each block
  std::vector<std::int64_t> excl;       // excluded partners of i in each block
  std::vector<std::int64_t> new_dyads;  // dyads i would add to each block pair
  std::vector<double> log_weights;

  for (Vertex i = 0; i < n; ++i) {
    to_block.assign(L, 0);
    excl.assign(L, 0);
    if (layer.support != nullptr)
      for (const auto& e : layer.support->of(i)) to_block[z.z[e.other]] += layer.count(e.dyad);
    if (layer.excluded != nullptr)
      for (const auto& e : layer.excluded->of(i)) ++excl[z.z[e.other]];

    // take i out of its block
    const std::uint32_t b = z.z[i];
    --z.sizes[b];
    new_dyads.resize(L);
    for (std::size_t m = 0; m < L; ++m) {
      new_dyads[m] = static_cast<std::int64_t>(z.sizes[m]) - excl[m];
      edges.add(b, m, -to_block[m]);
      dyads.add(b, m, -new_dyads[m]);
      cached.set(b, m, pair_term(edges(b, m), dyads(b, m)));
    }
    if (z.sizes[b] == 0) {
      const std::size_t last = L - 1;
      if (b != last) {
        for (auto& label : z.z)
          if (label == last) label = b;
        z.sizes[b] = z.sizes[last];
        to_block[b] = to_block[last];
        new_dyads[b] = new_dyads[last];
      }
      z.sizes.pop_back();
      to_block.pop_back();
      new_dyads.pop_back();
      edges.remove_block(b);
      dyads.remove_block(b);
      cached.remove_block(b);
      --L;
    }

    // existing blocks, then a fresh block
    log_weights.resize(L + 1);
    for (std::size_t l = 0; l < L; ++l) {
      double w = std::log(static_cast<double>(z.sizes[l]));
      for (std::size_t m = 0; m < L; ++m)
        w += pair_term(edges(l, m) + to_block[m], dyads(l, m) + new_dyads[m]) - cached(l, m);
      log_weights[l] = w;
    }
    double fresh = log_alpha;
    for (std::size_t m = 0; m < L; ++m) fresh += pair_term(to_block[m], new_dyads[m]) - empty_term;
    log_weights[L] = fresh;

    const auto choice = static_cast<std::uint32_t>(sample_log_categorical(log_weights, rng));
    if (choice == L) {
      z.sizes.push_back(0);
      edges.push_block();
      dyads.push_block();
      cached.push_block();
      to_block.push_back(0);
      new_dyads.push_back(0);
      ++L;
    }
    z.z[i] = choice;
    ++z.sizes[choice];
    for (std::size_t m = 0; m < L; ++m) {
      edges.add(choice, m, to_block[m]);
      dyads.add(choice, m, new_dyads[m]);
      cached.set(choice, m, pair_term(edges(choice, m), dyads(choice, m)));
    }
  }
}

RateMatrix sample_eta(const BlockStats& stats, double kappa, double lambda, Rng& rng) {
  check_rate_prior(kappa, lambda);
  const std::size_t L = stats.edges.size();
  RateMatrix eta(L);
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t m = l; m < L; ++m) {
      const double shape = static_cast<double>(stats.edges(l, m)) + kappa;
      const double rate = static_cast<double>(stats.dyads(l, m)) + lambda;
      eta.set(l, m, std::gamma_distribution<double>(shape, 1.0 / rate)(rng));
    }
  }
  return eta;
}

namespace {

// Random-walk step on log(theta); returns the new value.
template <typename LogTarget>
double mh_step_log(double theta, double step, const LogTarget& log_target, Rng& rng) {
  const double proposed = theta * std::exp(step * std::normal_distribution<double>()(rng));
  const double log_u = std::log(std::uniform_real_distribution<double>()(rng));
  if (!(proposed > 0.0) || !std::isfinite(proposed)) return theta;
  const double ratio = mh_log_acceptance(log_target(theta), log_target(proposed), theta, proposed);
  return log_u < ratio ? proposed : theta;
}

}  // namespace

Hyperparams mh_update_hyperparams(const Hyperparams& hp, const Assignment& z,
                                  const BlockStats& stats, Rng& rng, double step) {
  Hyperparams next = hp;
  next.alpha = mh_step_log(
      hp.alpha, step,
      [&z](double a) { return crp_log_density(z, a) + log_gamma21_prior(a); }, rng);
  next.kappa = mh_step_log(
      hp.kappa, step,
      [&](double k) { return block_log_marginal(stats, k, next.lambda) + log_gamma21_prior(k); },
      rng);
  next.lambda = mh_step_log(
      hp.lambda, step,
      [&](double l) { return block_log_marginal(stats, next.kappa, l) + log_gamma21_prior(l); },
      rng);
  return next;
}

}  // namespace mnsbm

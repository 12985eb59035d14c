#include "mnsbm/superposition.hpp"

#include <algorithm>
#include <numeric>
#include <omp.h>

#include "mnsbm/errors.hpp"
#include "mnsbm/math.hpp"

namespace mnsbm {

std::uint32_t EnsembleState::total(std::size_t d) const {
  const std::size_t S = subs.size();
  std::uint32_t sum = 0;
  for (std::size_t s = 0; s < S; ++s) sum += counts[d * S + s];
  return sum;
}

void SweepConfig::validate() const {
  if (iterations == 0) throw ArgumentError("iterations must be positive");
  if (burn_in >= iterations) throw ArgumentError("burn-in must be smaller than iterations");
  if (thinning == 0) throw ArgumentError("thinning must be positive");
  if (parallel_workers < 1) throw ArgumentError("worker count must be positive");
  if (!(mh_step > 0.0)) throw ArgumentError("MH step must be positive");
}

EnsembleState make_ensemble(const ObservedGraph& train, const HeldoutSet& heldout,
                            std::size_t S) {
  if (S == 0) throw ArgumentError("need at least one subnetwork");
  if (train.n == 0) throw ArgumentError("graph has no vertices");
  train.validate();
  EnsembleState ens;
  ens.n = train.n;
  ens.dyads = train.edges;
  ens.constrained = train.edges.size();
  for (const LabeledDyad& h : heldout.dyads) {
    if (!(h.dyad.i < h.dyad.j) || h.dyad.j >= train.n)
      throw ArgumentError("held-out dyad out of range");
    if (train.has_edge(h.dyad)) throw ArgumentError("held-out dyad is also a training link");
    ens.dyads.push_back(h.dyad);
  }
  ens.support = Adjacency::build(ens.n, ens.dyads);
  ens.counts.assign(ens.dyads.size() * S, 0);
  ens.subs.resize(S);
  for (std::size_t s = 0; s < S; ++s) ens.subs[s].stream_id = s;
  return ens;
}

void initialize_ensemble(EnsembleState& ens, std::uint64_t master_seed, const Hyperparams& hp) {
  const std::size_t S = ens.S();
  for (auto& sub : ens.subs) {
    Rng rng = make_stream(master_seed, StreamTag::kInit, 0, sub.stream_id);
    sub.z = sample_crp(ens.n, 1.0, rng);
    sub.hp = hp;
  }
  std::fill(ens.counts.begin(), ens.counts.end(), 0);
  Rng rng = make_stream(master_seed, StreamTag::kInit, 1);
  std::uniform_int_distribution<std::size_t> pick(0, S - 1);
  for (std::size_t d = 0; d < ens.constrained; ++d) ens.counts[d * S + pick(rng)] = 1;
  for (std::size_t s = 0; s < S; ++s) {
    auto& sub = ens.subs[s];
    sub.stats = block_stats(sub.z, ens.layer(s));
    Rng eta_rng = make_stream(master_seed, StreamTag::kInit, 2, sub.stream_id);
    sub.eta = sample_eta(sub.stats, sub.hp.kappa, sub.hp.lambda, eta_rng);
  }
}

namespace {

double floored_rate(const SubnetworkState& sub, Dyad d) {
  return std::max(sub.eta(sub.z.z[d.i], sub.z.z[d.j]), kRateFloor);
}

// Subnetwork indices in stream-id order; the multinomial split visits
// subnetworks in this order so relabelling them permutes the result.
std::vector<std::size_t> stream_order(const EnsembleState& ens) {
  std::vector<std::size_t> order(ens.S());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ens.subs[a].stream_id < ens.subs[b].stream_id;
  });
  return order;
}

std::uint32_t sample_poisson(double eta, Rng& rng) {
  return static_cast<std::uint32_t>(std::poisson_distribution<std::int64_t>(eta)(rng));
}

// Draws new per-subnetwork counts for one dyad into `out` (stream order).
void draw_dyad(const EnsembleState& ens, std::size_t d, std::span<const std::size_t> order,
               std::span<double> rates, std::span<std::uint32_t> out, Rng& rng) {
  const Dyad dyad = ens.dyads[d];
  double eta = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    rates[k] = floored_rate(ens.subs[order[k]], dyad);
    eta += rates[k];
  }
  const std::uint32_t total =
      d < ens.constrained ? sample_total_count(1, eta, rng) : sample_poisson(eta, rng);
  split_count(total, rates, rng, out);
}

void rebuild_edge_stats(EnsembleState& ens, int workers) {
  const auto S = static_cast<std::int64_t>(ens.S());
#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (std::int64_t s = 0; s < S; ++s) {
    auto& sub = ens.subs[static_cast<std::size_t>(s)];
    sub.stats.edges.fill(0);
    for (std::size_t d = 0; d < ens.dyads.size(); ++d) {
      const Dyad dyad = ens.dyads[d];
      sub.stats.edges.add(sub.z.z[dyad.i], sub.z.z[dyad.j],
                          ens.counts[d * ens.S() + static_cast<std::size_t>(s)]);
    }
  }
}

}  // namespace

double total_rate(const EnsembleState& ens, Dyad d) {
  double eta = 0.0;
  for (const auto& sub : ens.subs) eta += floored_rate(sub, d);
  return eta;
}

void subnetwork_rates(const EnsembleState& ens, Dyad d, std::span<double> out) {
  for (std::size_t s = 0; s < ens.S(); ++s) out[s] = floored_rate(ens.subs[s], d);
}

std::uint32_t sample_total_count(int a_star, double eta, Rng& rng) {
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw ArgumentError("total rate must be positive and finite");
  if (a_star == 0) return 0;
  if (eta > 30.0) {
    // P(0) < 1e-13: rejection from the untruncated law almost never repeats
    std::poisson_distribution<std::int64_t> poisson(eta);
    std::int64_t k = 0;
    while (k == 0) k = poisson(rng);
    return static_cast<std::uint32_t>(k);
  }
  // inversion over the zero-truncated pmf
  const double u = std::uniform_real_distribution<double>()(rng);
  double p = eta * std::exp(-eta) / -std::expm1(-eta);
  double cdf = p;
  std::uint32_t k = 1;
  while (u > cdf) {
    ++k;
    p *= eta / k;
    if (p == 0.0) break;
    cdf += p;
  }
  return k;
}

void split_count(std::uint32_t total, std::span<const double> rates, Rng& rng,
                 std::span<std::uint32_t> out) {
  if (rates.empty()) throw ArgumentError("split_count needs at least one rate");
  if (out.size() != rates.size()) throw ArgumentError("split_count output size mismatch");
  std::fill(out.begin(), out.end(), 0);
  if (total == 0) return;
  const std::size_t S = rates.size();
  double rest = 0.0;
  for (double r : rates) rest += r;
  std::uint32_t remaining = total;
  for (std::size_t k = 0; k + 1 < S && remaining > 0; ++k) {
    const double p = std::clamp(rates[k] / rest, 0.0, 1.0);
    const auto x = static_cast<std::uint32_t>(
        std::binomial_distribution<std::int64_t>(remaining, p)(rng));
    out[k] = x;
    remaining -= x;
    rest -= rates[k];
    if (!(rest > 0.0)) {
      // rounding left nothing for the tail; the last positive rate takes the rest
      rest = 0.0;
      for (std::size_t t = k + 1; t < S; ++t) rest += rates[t];
    }
  }
  out[S - 1] += remaining;
}

std::vector<std::uint32_t> split_count(std::uint32_t total, std::span<const double> rates,
                                       Rng& rng) {
  std::vector<std::uint32_t> out(rates.size());
  split_count(total, rates, rng, out);
  return out;
}

void resample_dyads(EnsembleState& ens, std::size_t first, std::size_t last,
                    const SweepContext& ctx) {
  last = std::min(last, ens.dyads.size());
  if (first >= last) return;
  const std::size_t S = ens.S();
  const auto order = stream_order(ens);
  const auto first_block = static_cast<std::int64_t>(first / kDyadBlockSize);
  const auto last_block = static_cast<std::int64_t>((last + kDyadBlockSize - 1) / kDyadBlockSize);

#pragma omp parallel num_threads(ctx.workers)
  {
    std::vector<double> rates(S);
    std::vector<std::uint32_t> split(S);
#pragma omp for schedule(dynamic)
    for (std::int64_t blk = first_block; blk < last_block; ++blk) {
      const auto ublk = static_cast<std::size_t>(blk);
      Rng rng = make_stream(ctx.master_seed, StreamTag::kEdges, ctx.iteration, ublk);
      const std::size_t begin = std::max(first, ublk * kDyadBlockSize);
      const std::size_t end = std::min(last, (ublk + 1) * kDyadBlockSize);
      for (std::size_t d = begin; d < end; ++d) {
        draw_dyad(ens, d, order, rates, split, rng);
        for (std::size_t k = 0; k < S; ++k) ens.counts[d * S + order[k]] = split[k];
      }
    }
  }
  rebuild_edge_stats(ens, ctx.workers);
}

void resample_edges(EnsembleState& ens, const SweepContext& ctx) {
  resample_dyads(ens, 0, ens.dyads.size(), ctx);
}

void full_sweep(EnsembleState& ens, const SweepContext& ctx) {
  const auto S = static_cast<std::int64_t>(ens.S());

#pragma omp parallel for schedule(dynamic) num_threads(ctx.workers)
  for (std::int64_t s = 0; s < S; ++s) {
    auto& sub = ens.subs[static_cast<std::size_t>(s)];
    Rng rng = make_stream(ctx.master_seed, StreamTag::kEta, ctx.iteration, sub.stream_id);
    sub.eta = sample_eta(sub.stats, sub.hp.kappa, sub.hp.lambda, rng);
  }

  resample_edges(ens, ctx);

#pragma omp parallel for schedule(dynamic) num_threads(ctx.workers)
  for (std::int64_t s = 0; s < S; ++s) {
    auto& sub = ens.subs[static_cast<std::size_t>(s)];
    Rng rng = make_stream(ctx.master_seed, StreamTag::kGibbs, ctx.iteration, sub.stream_id);
    gibbs_sweep_z(sub.z, sub.stats, ens.layer(static_cast<std::size_t>(s)), sub.hp, rng);
  }

  if (!ctx.sample_hyperparams) return;
#pragma omp parallel for schedule(dynamic) num_threads(ctx.workers)
  for (std::int64_t s = 0; s < S; ++s) {
    auto& sub = ens.subs[static_cast<std::size_t>(s)];
    Rng rng = make_stream(ctx.master_seed, StreamTag::kHyper, ctx.iteration, sub.stream_id);
    sub.hp = mh_update_hyperparams(sub.hp, sub.z, sub.stats, rng, ctx.mh_step);
  }
}

double joint_log_density(const EnsembleState& ens) {
  double value = 0.0;
  for (std::size_t s = 0; s < ens.S(); ++s) {
    const auto& sub = ens.subs[s];
    value += crp_log_density(sub.z, sub.hp.alpha) +
             collapsed_log_likelihood(sub.stats, ens.layer(s), sub.hp.kappa, sub.hp.lambda) +
             log_gamma21_prior(sub.hp.alpha) + log_gamma21_prior(sub.hp.kappa) +
             log_gamma21_prior(sub.hp.lambda);
  }
  return value;
}

std::string check_invariants(const EnsembleState& ens) {
  const std::size_t S = ens.S();
  if (ens.counts.size() != ens.dyads.size() * S) return "count table has wrong size";
  for (std::size_t d = 0; d < ens.constrained; ++d)
    if (ens.total(d) == 0)
      return "training link " + std::to_string(ens.dyads[d].i) + "-" +
             std::to_string(ens.dyads[d].j) + " has zero latent total";
  for (std::size_t s = 0; s < S; ++s) {
    const auto& sub = ens.subs[s];
    if (sub.z.n() != ens.n || !sub.z.valid())
      return "subnetwork " + std::to_string(s) + " has an invalid assignment";
    if (!(sub.stats == block_stats(sub.z, ens.layer(s))))
      return "subnetwork " + std::to_string(s) + " block statistics are stale";
  }
  return {};
}

ChainTrace run_chain(const ObservedGraph& train, const HeldoutSet& heldout, std::size_t S,
                     const SweepConfig& cfg, const std::atomic<bool>* cancel) {
  cfg.validate();
  EnsembleState ens = make_ensemble(train, heldout, S);
  initialize_ensemble(ens, cfg.master_seed, cfg.fixed_hyperparams.value_or(Hyperparams{}));

  ChainTrace trace;
  trace.n = ens.n;
  trace.S = S;
  trace.iterations = cfg.iterations;
  trace.burn_in = cfg.burn_in;
  trace.thinning = cfg.thinning;
  trace.master_seed = cfg.master_seed;
  trace.heldout = heldout.dyads;
  if (cfg.record_counts) trace.count_dyads = ens.dyads;
  trace.records.reserve(ChainTrace::expected_records(cfg.iterations, cfg.burn_in, cfg.thinning));

  SweepContext ctx;
  ctx.master_seed = cfg.master_seed;
  ctx.workers = cfg.parallel_workers;
  ctx.sample_hyperparams = !cfg.fixed_hyperparams.has_value();
  ctx.mh_step = cfg.mh_step;

  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    if (cancel != nullptr && cancel->load(std::memory_order_relaxed)) break;
    ctx.iteration = t;
    full_sweep(ens, ctx);
    if (!trace.retains(t)) continue;

    ChainRecord rec;
    rec.iteration = t;
    rec.log_density = joint_log_density(ens);
    for (const auto& sub : ens.subs) {
      rec.assignments.push_back(sub.z.z);
      rec.hyperparams.push_back(sub.hp);
    }
    rec.imputed_totals.reserve(ens.heldout_count());
    for (std::size_t d = ens.constrained; d < ens.dyads.size(); ++d)
      rec.imputed_totals.push_back(ens.total(d));
    if (cfg.record_counts) rec.counts = ens.counts;
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

namespace reference {

void resample_edges(EnsembleState& ens, const SweepContext& ctx) {
  const std::size_t S = ens.S();
  const auto order = stream_order(ens);
  std::vector<double> rates(S);
  std::vector<std::uint32_t> split(S);
  const std::size_t D = ens.dyads.size();
  for (std::size_t blk = 0; blk * kDyadBlockSize < D; ++blk) {
    Rng rng = make_stream(ctx.master_seed, StreamTag::kEdges, ctx.iteration, blk);
    const std::size_t end = std::min(D, (blk + 1) * kDyadBlockSize);
    for (std::size_t d = blk * kDyadBlockSize; d < end; ++d) {
      draw_dyad(ens, d, order, rates, split, rng);
      const Dyad dyad = ens.dyads[d];
      for (std::size_t k = 0; k < S; ++k) {
        const std::size_t s = order[k];
        auto& sub = ens.subs[s];
        const std::int64_t delta =
            static_cast<std::int64_t>(split[k]) - static_cast<std::int64_t>(ens.counts[d * S + s]);
        sub.stats.edges.add(sub.z.z[dyad.i], sub.z.z[dyad.j], delta);
        ens.counts[d * S + s] = split[k];
      }
    }
  }
}

void full_sweep(EnsembleState& ens, const SweepContext& ctx) {
  for (auto& sub : ens.subs) {
    Rng rng = make_stream(ctx.master_seed, StreamTag::kEta, ctx.iteration, sub.stream_id);
    sub.eta = sample_eta(sub.stats, sub.hp.kappa, sub.hp.lambda, rng);
  }
  reference::resample_edges(ens, ctx);
  for (std::size_t s = 0; s < ens.S(); ++s) {
    auto& sub = ens.subs[s];
    Rng rng = make_stream(ctx.master_seed, StreamTag::kGibbs, ctx.iteration, sub.stream_id);
    gibbs_sweep_z(sub.z, sub.stats, ens.layer(s), sub.hp, rng);
  }
  if (!ctx.sample_hyperparams) return;
  for (auto& sub : ens.subs) {
    Rng rng = make_stream(ctx.master_seed, StreamTag::kHyper, ctx.iteration, sub.stream_id);
    sub.hp = mh_update_hyperparams(sub.hp, sub.z, sub.stats, rng, ctx.mh_step);
  }
}

}  // namespace reference

}  // namespace mnsbm

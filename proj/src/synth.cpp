#include "mnsbm/synth.hpp"

#include <cmath>
#include <sstream>

#include "mnsbm/errors.hpp"

namespace mnsbm {

std::size_t PlantedModel::overlapping_vertices() const {
  std::size_t count = 0;
  for (std::size_t v = 0; v < N; ++v)
    if (assignments[0][v] != assignments[1][v]) ++count;
  return count;
}

PlantedModel planted_params(std::size_t N, std::size_t K, std::size_t shift) {
  if (K == 0 || N == 0 || N % K != 0) throw ArgumentError("N must be a positive multiple of K");
  if (2 * K * shift > N)
    throw ArgumentError("shift " + std::to_string(shift) + " exceeds N/(2K) = " +
                        std::to_string(static_cast<double>(N) / (2.0 * static_cast<double>(K))));
  PlantedModel pm;
  pm.N = N;
  pm.K = K;
  pm.shift = shift;
  pm.lambda_shift = 2.0 * static_cast<double>(K * shift) / static_cast<double>(N);
  const std::size_t block = N / K;
  pm.assignments.assign(2, std::vector<std::uint32_t>(N));
  for (std::size_t v = 0; v < N; ++v) {
    pm.assignments[0][v] = static_cast<std::uint32_t>(v / block);
    // boundaries rotated forward by `shift` vertices
    pm.assignments[1][v] = static_cast<std::uint32_t>(((v + N - shift) % N) / block);
  }
  const double diagonal[2] = {kPlantedDiagonal1, kPlantedDiagonal2};
  for (double diag : diagonal) {
    RateMatrix eta(K);
    eta.fill(kPlantedOffDiagonal);
    for (std::size_t l = 0; l < K; ++l) eta.set(l, l, diag);
    pm.rates.push_back(std::move(eta));
  }
  return pm;
}

std::size_t shift_for_lambda(std::size_t N, std::size_t K, double lambda) {
  if (K == 0 || N == 0 || N % K != 0) throw ArgumentError("N must be a positive multiple of K");
  const double m = lambda * static_cast<double>(N) / (2.0 * static_cast<double>(K));
  const double rounded = std::round(m);
  if (!(lambda >= 0.0 && lambda <= 1.0) || std::abs(m - rounded) > 1e-9) {
    std::ostringstream msg;
    msg << "lambda " << lambda << " gives non-integer shift m = " << m << " for N=" << N
        << ", K=" << K;
    throw ArgumentError(msg.str());
  }
  return static_cast<std::size_t>(rounded);
}

SyntheticNetwork generate(const PlantedModel& pm, Rng& rng) {
  SyntheticNetwork out;
  out.graph.n = pm.N;
  out.truth.assignments = pm.assignments;
  out.truth.counts.resize(pm.assignments.size());
  const std::size_t layers = pm.assignments.size();
  for (Vertex i = 0; i < pm.N; ++i) {
    for (Vertex j = i + 1; j < pm.N; ++j) {
      std::uint64_t total = 0;
      for (std::size_t s = 0; s < layers; ++s) {
        const double rate = pm.rates[s](pm.assignments[s][i], pm.assignments[s][j]);
        if (!(rate > 0.0)) continue;
        const auto c =
            static_cast<std::uint32_t>(std::poisson_distribution<std::int64_t>(rate)(rng));
        if (c > 0) out.truth.counts[s].push_back({Dyad{i, j}, c});
        total += c;
      }
      if (total > 0) out.graph.edges.push_back({i, j});
    }
  }
  return out;
}

std::vector<ExperimentRun> experiment_grid(std::span<const std::size_t> K_list,
                                           std::span<const double> lambda_grid,
                                           std::size_t restarts,
                                           std::span<const std::size_t> S_list,
                                           std::uint64_t master_seed) {
  std::vector<ExperimentRun> runs;
  for (std::size_t K : K_list) {
    const std::size_t N = 20 * K;
    for (double lambda : lambda_grid) {
      const std::size_t shift = shift_for_lambda(N, K, lambda);
      for (std::size_t r = 0; r < restarts; ++r) {
        const std::uint64_t data_seed =
            derive_seed(master_seed, StreamTag::kExperiment, (std::uint64_t{K} << 32) | shift, r);
        for (std::size_t S : S_list) {
          ExperimentRun run;
          run.K = K;
          run.N = N;
          run.lambda = lambda;
          run.shift = shift;
          run.restart = r;
          run.S = S;
          run.data_seed = data_seed;
          run.chain_seed = derive_seed(data_seed, StreamTag::kExperiment, S);
          runs.push_back(run);
        }
      }
    }
  }
  return runs;
}

}  // namespace mnsbm

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mnsbm/graph_io.hpp"
#include "mnsbm/prediction.hpp"
#include "mnsbm/rng.hpp"

namespace mnsbm {

// Two-subnetwork planted model with K equal contiguous blocks; the second
// subnetwork's block boundaries are rotated by `shift` vertices.
struct PlantedModel {
  std::size_t N = 0;
  std::size_t K = 0;
  std::size_t shift = 0;
  std::vector<std::vector<std::uint32_t>> assignments;  // two layers
  std::vector<RateMatrix> rates;                        // two layers
  double lambda_shift = 0.0;                            // 2 K shift / N

  // Vertices whose second-layer block differs from their first-layer block.
  std::size_t overlapping_vertices() const;
};

inline constexpr double kPlantedDiagonal1 = 1.0;
inline constexpr double kPlantedDiagonal2 = 1.5;
inline constexpr double kPlantedOffDiagonal = 0.1;

PlantedModel planted_params(std::size_t N, std::size_t K, std::size_t shift);

// Shift for a requested lambda_shift; throws when lambda * N / (2K) is not
// an integer.
std::size_t shift_for_lambda(std::size_t N, std::size_t K, double lambda);

struct SyntheticNetwork {
  ObservedGraph graph;
  GroundTruth truth;
};

SyntheticNetwork generate(const PlantedModel& pm, Rng& rng);

struct ExperimentRun {
  std::size_t K = 0;
  std::size_t N = 0;
  double lambda = 0.0;
  std::size_t shift = 0;
  std::size_t restart = 0;
  std::size_t S = 0;
  std::uint64_t data_seed = 0;   // shared by every S of one (K, lambda, restart)
  std::uint64_t chain_seed = 0;
};

// Enumerates (K, N = 20 K, lambda, restart, S) in that nesting order.
std::vector<ExperimentRun> experiment_grid(std::span<const std::size_t> K_list,
                                           std::span<const double> lambda_grid,
                                           std::size_t restarts,
                                           std::span<const std::size_t> S_list,
                                           std::uint64_t master_seed);

}  // namespace mnsbm

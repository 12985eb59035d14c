#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "mnsbm/superposition.hpp"
#include "mnsbm/trace.hpp"

namespace mnsbm {

struct PredictionRow {
  Dyad dyad;
  std::uint8_t label = 0;
  double score = 0.0;
};

using PredictionTable = std::vector<PredictionRow>;

// Redraws the held-out dyads from the unconstrained Poisson law and splits
// them across subnetworks. Training-link counts are untouched.
void impute_heldout(EnsembleState& ens, const SweepContext& ctx);

// Fraction of retained records whose imputed total is positive.
PredictionTable predict_link_prob(const ChainTrace& trace);

void write_predictions(const PredictionTable& table, std::ostream& out);
void write_predictions(const PredictionTable& table, const std::filesystem::path& path);

// Probability that a random positive outscores a random negative, ties
// counted half; computed from midranks.
double auc(std::span<const std::uint8_t> labels, std::span<const double> scores);
double auc(const PredictionTable& table);

// Planted truth of a synthetic run: per-subnetwork assignments and counts
// over the dyads with a positive count in that subnetwork.
struct GroundTruth {
  std::vector<std::vector<std::uint32_t>> assignments;  // [s][vertex]
  std::vector<std::vector<std::pair<Dyad, std::uint32_t>>> counts;  // [s], sorted
};

struct SimilarityVectors {
  std::vector<Dyad> edges;
  std::vector<std::uint8_t> truth;     // a_k
  std::vector<double> estimate;        // w_k
};

// a_k: some true subnetwork generated the edge inside one block.
// w_k: count-weighted same-block share, averaged over records with
// iteration >= trace.iterations - window whose estimated total is positive.
SimilarityVectors same_block_vectors(const GroundTruth& truth, const ChainTrace& trace,
                                     std::size_t window = 500);

double structure_auc(const SimilarityVectors& v);

}  // namespace mnsbm

#include "mnsbm/prediction.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "mnsbm/errors.hpp"

namespace mnsbm {

void impute_heldout(EnsembleState& ens, const SweepContext& ctx) {
  resample_dyads(ens, ens.constrained, ens.dyads.size(), ctx);
}

PredictionTable predict_link_prob(const ChainTrace& trace) {
  if (trace.records.empty()) throw ArgumentError("trace has no retained records");
  PredictionTable table;
  table.reserve(trace.heldout.size());
  const auto R = static_cast<double>(trace.records.size());
  for (std::size_t h = 0; h < trace.heldout.size(); ++h) {
    std::size_t hits = 0;
    for (const auto& rec : trace.records) {
      if (rec.imputed_totals.size() != trace.heldout.size())
        throw ArgumentError("record lacks imputed held-out counts");
      if (rec.imputed_totals[h] > 0) ++hits;
    }
    table.push_back({trace.heldout[h].dyad, trace.heldout[h].label, static_cast<double>(hits) / R});
  }
  return table;
}

void write_predictions(const PredictionTable& table, std::ostream& out) {
  out << "i,j,label,score\n";
  char buf[64];
  for (const auto& row : table) {
    const auto res = std::to_chars(buf, buf + sizeof buf, row.score);
    out << row.dyad.i << ',' << row.dyad.j << ',' << static_cast<int>(row.label) << ','
        << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
  }
  if (!out) throw IoError("error writing predictions");
}

void write_predictions(const PredictionTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_predictions(table, out);
}

double auc(std::span<const std::uint8_t> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw ArgumentError("AUC: label/score length mismatch");
  const auto positives =
      static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0)
    throw ArgumentError("AUC undefined: need both positive and negative labels");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // sum of 1-based midranks over positives, doubled to stay integral
  std::uint64_t rank_sum2 = 0;
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo;
    while (hi < order.size() && scores[order[hi]] == scores[order[lo]]) ++hi;
    const std::uint64_t midrank2 = lo + 1 + hi;  // 2 * (lo + 1 + hi) / 2
    for (std::size_t k = lo; k < hi; ++k)
      if (labels[order[k]] == 1) rank_sum2 += midrank2;
    lo = hi;
  }
  const auto P = static_cast<double>(positives);
  const double u = static_cast<double>(rank_sum2) / 2.0 - P * (P + 1.0) / 2.0;
  return u / (P * static_cast<double>(negatives));
}

double auc(const PredictionTable& table) {
  std::vector<std::uint8_t> labels;
  std::vector<double> scores;
  for (const auto& row : table) {
    labels.push_back(row.label);
    scores.push_back(row.score);
  }
  return auc(labels, scores);
}

namespace {

std::uint64_t dyad_key(Dyad d) { return (static_cast<std::uint64_t>(d.i) << 32) | d.j; }

}  // namespace

SimilarityVectors same_block_vectors(const GroundTruth& truth, const ChainTrace& trace,
                                     std::size_t window) {
  // realised true edges with their same-block indicator
  std::vector<std::pair<Dyad, std::uint8_t>> true_edges;
  for (std::size_t s = 0; s < truth.counts.size(); ++s) {
    const auto& z = truth.assignments.at(s);
    for (const auto& [dyad, count] : truth.counts[s]) {
      if (count == 0) continue;
      true_edges.emplace_back(dyad, z.at(dyad.i) == z.at(dyad.j) ? 1 : 0);
    }
  }
  std::sort(true_edges.begin(), true_edges.end());
  SimilarityVectors v;
  for (std::size_t k = 0; k < true_edges.size();) {
    std::size_t end = k;
    std::uint8_t same = 0;
    while (end < true_edges.size() && true_edges[end].first == true_edges[k].first)
      same |= true_edges[end++].second;
    v.edges.push_back(true_edges[k].first);
    v.truth.push_back(same);
    k = end;
  }
  if (v.edges.empty()) throw ArgumentError("ground truth contains no edges");
  if (trace.count_dyads.empty()) throw ArgumentError("trace does not record latent counts");

  std::unordered_map<std::uint64_t, std::size_t> index;
  for (std::size_t d = 0; d < trace.count_dyads.size(); ++d)
    index.emplace(dyad_key(trace.count_dyads[d]), d);

  const std::size_t S = trace.S;
  const std::size_t start = trace.iterations > window ? trace.iterations - window : 0;
  v.estimate.assign(v.edges.size(), 0.0);
  for (std::size_t k = 0; k < v.edges.size(); ++k) {
    const auto it = index.find(dyad_key(v.edges[k]));
    if (it == index.end()) continue;
    const std::size_t d = it->second;
    const Dyad e = v.edges[k];
    double sum = 0.0;
    std::size_t used = 0;
    for (const auto& rec : trace.records) {
      if (rec.iteration < start) continue;
      std::uint64_t total = 0;
      std::uint64_t same = 0;
      for (std::size_t s = 0; s < S; ++s) {
        const std::uint32_t c = rec.counts.at(d * S + s);
        total += c;
        if (rec.assignments[s][e.i] == rec.assignments[s][e.j]) same += c;
      }
      if (total == 0) continue;
      sum += static_cast<double>(same) / static_cast<double>(total);
      ++used;
    }
    v.estimate[k] = used == 0 ? 0.0 : sum / static_cast<double>(used);
  }
  return v;
}

double structure_auc(const SimilarityVectors& v) { return auc(v.truth, v.estimate); }

}  // namespace mnsbm

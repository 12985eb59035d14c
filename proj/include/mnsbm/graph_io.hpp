#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "mnsbm/rng.hpp"

namespace mnsbm {

using Vertex = std::uint32_t;

// Unordered vertex pair in canonical form i < j.
struct Dyad {
  Vertex i = 0;
  Vertex j = 0;

  friend auto operator<=>(const Dyad&, const Dyad&) = default;
};

inline Dyad make_dyad(Vertex a, Vertex b) { return a < b ? Dyad{a, b} : Dyad{b, a}; }

// Binary symmetric observation without self-loops. Only present links are
// stored; every absent dyad is a non-edge.
struct ObservedGraph {
  std::size_t n = 0;
  std::vector<Dyad> edges;  // sorted, unique, i < j < n

  std::size_t edge_count() const { return edges.size(); }
  std::size_t dyad_count() const { return n * (n - 1) / 2; }
  bool has_edge(Dyad d) const;
  // Throws ArgumentError when a structural invariant is broken.
  void validate() const;

  friend bool operator==(const ObservedGraph&, const ObservedGraph&) = default;
};

struct LabeledDyad {
  Dyad dyad;
  std::uint8_t label = 0;  // 1 = held-out link, 0 = held-out non-link

  friend bool operator==(const LabeledDyad&, const LabeledDyad&) = default;
};

// Dyads removed from the likelihood and scored by prediction.
struct HeldoutSet {
  std::vector<LabeledDyad> dyads;
  double fraction = 0.0;

  std::size_t positives() const;
  std::size_t negatives() const;
  bool empty() const { return dyads.empty(); }
};

struct ParseOptions {
  std::optional<std::size_t> n_hint;
  bool one_based = false;
};

// Reads "i j" or "i j w" lines; '#' and '%' start comment lines. Input is
// symmetrised, weights of repeated dyads are summed, self-loops dropped and
// any positive total weight becomes a link.
ObservedGraph parse_edge_list(std::istream& in, const ParseOptions& options = {});
ObservedGraph parse_edge_list(std::string_view text, const ParseOptions& options = {});
ObservedGraph read_edge_list(const std::filesystem::path& path, const ParseOptions& options = {});

// One "i j" line per link, 0-based, sorted.
void write_graph(const ObservedGraph& g, std::ostream& out);
void write_graph(const ObservedGraph& g, const std::filesystem::path& path);

struct HoldoutSplit {
  ObservedGraph train;
  HeldoutSet test;
};

// Holds out floor(edge_fraction * E) uniformly chosen links and as many
// uniformly chosen non-links. Held-out links are removed from train.
HoldoutSplit split_holdout(const ObservedGraph& g, double edge_fraction, Rng& rng);

}  // namespace mnsbm

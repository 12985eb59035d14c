#include "mnsbm/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "mnsbm/errors.hpp"

namespace mnsbm {

bool ObservedGraph::has_edge(Dyad d) const {
  return std::binary_search(edges.begin(), edges.end(), d);
}

void ObservedGraph::validate() const {
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Dyad& d = edges[k];
    if (!(d.i < d.j) || d.j >= n) throw ArgumentError("graph: dyad out of canonical range");
    if (k > 0 && !(edges[k - 1] < d)) throw ArgumentError("graph: dyads not sorted and unique");
  }
}

std::size_t HeldoutSet::positives() const {
  return static_cast<std::size_t>(
      std::count_if(dyads.begin(), dyads.end(), [](const LabeledDyad& d) { return d.label == 1; }));
}

std::size_t HeldoutSet::negatives() const { return dyads.size() - positives(); }

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && is_space(line[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && !is_space(line[pos])) ++pos;
    if (pos > start) fields.push_back(line.substr(start, pos - start));
  }
  return fields;
}

std::uint64_t parse_index(std::string_view token, std::size_t line_no) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError(line_no, "invalid vertex index '" + std::string(token) + "'");
  return value;
}

double parse_weight(std::string_view token, std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value) ||
      value < 0.0)
    throw ParseError(line_no, "invalid weight '" + std::string(token) + "'");
  return value;
}

}  // namespace

ObservedGraph parse_edge_list(std::istream& in, const ParseOptions& options) {
  std::vector<std::pair<Dyad, double>> weighted;
  std::uint64_t max_index = 0;
  bool any_vertex = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty() || fields[0].front() == '#' || fields[0].front() == '%') continue;
    if (fields.size() != 2 && fields.size() != 3)
      throw ParseError(line_no, "expected 'i j' or 'i j w', got " +
                                    std::to_string(fields.size()) + " fields");

    std::uint64_t a = parse_index(fields[0], line_no);
    std::uint64_t b = parse_index(fields[1], line_no);
    const double w = fields.size() == 3 ? parse_weight(fields[2], line_no) : 1.0;
    if (options.one_based) {
      if (a == 0 || b == 0) throw ParseError(line_no, "index 0 in 1-based input");
      --a;
      --b;
    }
    if (options.n_hint && (a >= *options.n_hint || b >= *options.n_hint))
      throw ArgumentError("line " + std::to_string(line_no) + ": vertex index out of range for n=" +
                          std::to_string(*options.n_hint));
    if (a > 0xffffffffULL || b > 0xffffffffULL)
      throw ParseError(line_no, "vertex index exceeds 32 bits");

    max_index = std::max({max_index, a, b});
    any_vertex = true;
    if (a == b) continue;
    weighted.emplace_back(make_dyad(static_cast<Vertex>(a), static_cast<Vertex>(b)), w);
  }
  if (in.bad()) throw IoError("error reading edge list");

  ObservedGraph g;
  g.n = options.n_hint ? *options.n_hint : (any_vertex ? max_index + 1 : 0);

  std::sort(weighted.begin(), weighted.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  for (std::size_t k = 0; k < weighted.size();) {
    double total = 0.0;
    std::size_t end = k;
    while (end < weighted.size() && weighted[end].first == weighted[k].first)
      total += weighted[end++].second;
    if (total > 0.0) g.edges.push_back(weighted[k].first);
    k = end;
  }
  return g;
}

ObservedGraph parse_edge_list(std::string_view text, const ParseOptions& options) {
  std::istringstream in{std::string(text)};
  return parse_edge_list(in, options);
}

ObservedGraph read_edge_list(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list " + path.string());
  return parse_edge_list(in, options);
}

void write_graph(const ObservedGraph& g, std::ostream& out) {
  for (const Dyad& d : g.edges) out << d.i << ' ' << d.j << '\n';
  if (!out) throw IoError("error writing edge list");
}

void write_graph(const ObservedGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_graph(g, out);
}

HoldoutSplit split_holdout(const ObservedGraph& g, double edge_fraction, Rng& rng) {
  if (!(edge_fraction > 0.0 && edge_fraction < 1.0))
    throw ArgumentError("hold-out fraction must lie in (0, 1)");
  const std::size_t E = g.edge_count();
  const auto k = static_cast<std::size_t>(std::floor(edge_fraction * static_cast<double>(E)));
  if (k == 0)
    throw InfeasibleSplitError("hold-out fraction " + std::to_string(edge_fraction) +
                               " selects no links from " + std::to_string(E) + " edges");
  const std::size_t non_edges = g.dyad_count() - E;
  if (non_edges < k)
    throw InfeasibleSplitError("graph has " + std::to_string(non_edges) +
                               " non-links, need " + std::to_string(k));

  // partial Fisher-Yates over link indices
  std::vector<std::size_t> order(E);
  for (std::size_t e = 0; e < E; ++e) order[e] = e;
  for (std::size_t t = 0; t < k; ++t) {
    std::uniform_int_distribution<std::size_t> pick(t, E - 1);
    std::swap(order[t], order[pick(rng)]);
  }
  std::vector<Dyad> positives;
  positives.reserve(k);
  for (std::size_t t = 0; t < k; ++t) positives.push_back(g.edges[order[t]]);
  std::sort(positives.begin(), positives.end());

  std::vector<Dyad> negatives;
  if (2 * non_edges >= g.dyad_count()) {
    // rejection against the link set
    std::set<Dyad> chosen;
    std::uniform_int_distribution<Vertex> vertex(0, static_cast<Vertex>(g.n - 1));
    while (chosen.size() < k) {
      const Vertex a = vertex(rng);
      const Vertex b = vertex(rng);
      if (a == b) continue;
      const Dyad d = make_dyad(a, b);
      if (g.has_edge(d)) continue;
      chosen.insert(d);
    }
    negatives.assign(chosen.begin(), chosen.end());
  } else {
    // dense graph: enumerate the non-links and sample without replacement
    std::vector<Dyad> pool;
    pool.reserve(non_edges);
    for (Vertex i = 0; i < g.n; ++i)
      for (Vertex j = i + 1; j < g.n; ++j)
        if (!g.has_edge({i, j})) pool.push_back({i, j});
    for (std::size_t t = 0; t < k; ++t) {
      std::uniform_int_distribution<std::size_t> pick(t, pool.size() - 1);
      std::swap(pool[t], pool[pick(rng)]);
    }
    negatives.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(negatives.begin(), negatives.end());
  }

  HoldoutSplit split;
  split.train.n = g.n;
  split.train.edges.reserve(E - k);
  std::set_difference(g.edges.begin(), g.edges.end(), positives.begin(), positives.end(),
                      std::back_inserter(split.train.edges));
  split.test.fraction = edge_fraction;
  split.test.dyads.reserve(2 * k);
  for (const Dyad& d : positives) split.test.dyads.push_back({d, 1});
  for (const Dyad& d : negatives) split.test.dyads.push_back({d, 0});
  return split;
}

}  // namespace mnsbm

#include "mnsbm/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mnsbm/errors.hpp"

namespace mnsbm {

namespace {

constexpr std::string_view kTraceMagic = "mnsbm-trace";
constexpr int kTraceVersion = 1;

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// Whitespace tokenizer over the lines of a stream with line tracking.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-empty line split into tokens; the first token must be `key`.
  std::vector<std::string_view> expect(std::string_view key, std::size_t min_tokens = 1) {
    if (!next()) throw ParseError(line_no_, "unexpected end of file, expected '" + std::string(key) + "'");
    if (tokens_.empty() || tokens_[0] != key)
      throw ParseError(line_no_, "expected '" + std::string(key) + "'");
    if (tokens_.size() < min_tokens) throw ParseError(line_no_, "too few fields");
    return tokens_;
  }

  std::vector<std::string_view> line(std::size_t exact_tokens) {
    if (!next()) throw ParseError(line_no_, "unexpected end of file");
    if (tokens_.size() != exact_tokens)
      throw ParseError(line_no_, "expected " + std::to_string(exact_tokens) + " fields");
    return tokens_;
  }

  const std::string& raw() const { return line_; }

  template <typename T>
  T number(std::string_view token) const {
    T value{};
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
      throw ParseError(line_no_, "invalid number '" + std::string(token) + "'");
    return value;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  bool next() {
    while (std::getline(in_, line_)) {
      ++line_no_;
      tokens_.clear();
      std::size_t pos = 0;
      while (pos < line_.size()) {
        while (pos < line_.size() && (line_[pos] == ' ' || line_[pos] == '\t' || line_[pos] == '\r')) ++pos;
        const std::size_t start = pos;
        while (pos < line_.size() && line_[pos] != ' ' && line_[pos] != '\t' && line_[pos] != '\r') ++pos;
        if (pos > start) tokens_.emplace_back(line_.data() + start, pos - start);
      }
      if (!tokens_.empty()) return true;
    }
    return false;
  }

  std::istream& in_;
  std::string line_;
  std::vector<std::string_view> tokens_;
  std::size_t line_no_ = 0;
};

template <typename T>
void write_values(std::ostream& out, std::string_view key, const std::vector<T>& values) {
  out << key;
  for (const T& v : values) out << ' ' << v;
  out << '\n';
}

template <typename T>
std::vector<T> read_values(LineReader& reader, std::string_view key, std::size_t expected) {
  const auto tokens = reader.expect(key);
  if (tokens.size() != expected + 1)
    throw ParseError(reader.line_no(), "'" + std::string(key) + "' expects " +
                                           std::to_string(expected) + " values");
  std::vector<T> values;
  values.reserve(expected);
  for (std::size_t k = 1; k < tokens.size(); ++k) values.push_back(reader.number<T>(tokens[k]));
  return values;
}

std::size_t read_scalar(LineReader& reader, std::string_view key) {
  const auto tokens = reader.expect(key, 2);
  return reader.number<std::size_t>(tokens[1]);
}

}  // namespace

void write_trace(const ChainTrace& trace, std::ostream& out) {
  out << kTraceMagic << ' ' << kTraceVersion << '\n';
  out << "n " << trace.n << '\n';
  out << "subnetworks " << trace.S << '\n';
  out << "iterations " << trace.iterations << '\n';
  out << "burn_in " << trace.burn_in << '\n';
  out << "thinning " << trace.thinning << '\n';
  out << "seed " << trace.master_seed << '\n';
  out << "manifest " << (trace.manifest.empty() ? "-" : trace.manifest) << '\n';
  out << "heldout " << trace.heldout.size() << '\n';
  for (const auto& h : trace.heldout)
    out << h.dyad.i << ' ' << h.dyad.j << ' ' << static_cast<int>(h.label) << '\n';
  out << "count_dyads " << trace.count_dyads.size() << '\n';
  for (const auto& d : trace.count_dyads) out << d.i << ' ' << d.j << '\n';
  out << "records " << trace.records.size() << '\n';
  for (const auto& rec : trace.records) {
    out << "record " << rec.iteration << ' ' << format_double(rec.log_density) << '\n';
    for (std::size_t s = 0; s < rec.assignments.size(); ++s) {
      const auto& hp = rec.hyperparams[s];
      out << "sub " << s << ' ' << rec.block_count(s) << ' ' << format_double(hp.alpha) << ' '
          << format_double(hp.kappa) << ' ' << format_double(hp.lambda) << '\n';
      write_values(out, "z", rec.assignments[s]);
    }
    write_values(out, "imputed", rec.imputed_totals);
    if (!trace.count_dyads.empty()) write_values(out, "counts", rec.counts);
  }
  out << "end\n";
  if (!out) throw IoError("error writing trace");
}

void write_trace(const ChainTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_trace(trace, out);
}

ChainTrace read_trace(std::istream& in) {
  LineReader reader(in);
  {
    const auto tokens = reader.expect(kTraceMagic, 2);
    if (reader.number<int>(tokens[1]) != kTraceVersion)
      throw ParseError(reader.line_no(), "unsupported trace version");
  }
  ChainTrace t;
  t.n = read_scalar(reader, "n");
  t.S = read_scalar(reader, "subnetworks");
  t.iterations = read_scalar(reader, "iterations");
  t.burn_in = read_scalar(reader, "burn_in");
  t.thinning = read_scalar(reader, "thinning");
  {
    const auto tokens = reader.expect("seed", 2);
    t.master_seed = reader.number<std::uint64_t>(tokens[1]);
  }
  {
    reader.expect("manifest", 2);
    const std::string& raw = reader.raw();
    const auto start = raw.find_first_not_of(" \t", raw.find("manifest") + 8);
    std::string value = raw.substr(start);
    while (!value.empty() && (value.back() == '\r' || value.back() == ' ')) value.pop_back();
    t.manifest = value == "-" ? "" : value;
  }
  const std::size_t H = read_scalar(reader, "heldout");
  for (std::size_t h = 0; h < H; ++h) {
    const auto tok = reader.line(3);
    t.heldout.push_back({Dyad{reader.number<Vertex>(tok[0]), reader.number<Vertex>(tok[1])},
                         reader.number<std::uint8_t>(tok[2])});
  }
  const std::size_t D = read_scalar(reader, "count_dyads");
  for (std::size_t d = 0; d < D; ++d) {
    const auto tok = reader.line(2);
    t.count_dyads.push_back({reader.number<Vertex>(tok[0]), reader.number<Vertex>(tok[1])});
  }
  const std::size_t R = read_scalar(reader, "records");
  t.records.reserve(R);
  for (std::size_t r = 0; r < R; ++r) {
    ChainRecord rec;
    {
      const auto tok = reader.expect("record", 3);
      rec.iteration = reader.number<std::size_t>(tok[1]);
      rec.log_density = reader.number<double>(tok[2]);
    }
    for (std::size_t s = 0; s < t.S; ++s) {
      const auto tok = reader.expect("sub", 6);
      if (reader.number<std::size_t>(tok[1]) != s)
        throw ParseError(reader.line_no(), "subnetwork index out of order");
      Hyperparams hp{reader.number<double>(tok[3]), reader.number<double>(tok[4]),
                     reader.number<double>(tok[5])};
      rec.hyperparams.push_back(hp);
      rec.assignments.push_back(read_values<std::uint32_t>(reader, "z", t.n));
    }
    rec.imputed_totals = read_values<std::uint32_t>(reader, "imputed", H);
    if (D > 0) rec.counts = read_values<std::uint32_t>(reader, "counts", D * t.S);
    t.records.push_back(std::move(rec));
  }
  reader.expect("end");
  return t;
}

ChainTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace " + path.string());
  return read_trace(in);
}

void write_ground_truth(const GroundTruth& truth, const std::filesystem::path& dir) {
  for (std::size_t s = 0; s < truth.assignments.size(); ++s) {
    const std::string suffix = std::to_string(s + 1) + ".txt";
    {
      std::ofstream out(dir / ("truth_z" + suffix));
      if (!out) throw IoError("cannot write ground truth in " + dir.string());
      for (std::size_t v = 0; v < truth.assignments[s].size(); ++v)
        out << v << ' ' << truth.assignments[s][v] << '\n';
      if (!out) throw IoError("error writing ground truth");
    }
    {
      std::ofstream out(dir / ("truth_counts" + suffix));
      if (!out) throw IoError("cannot write ground truth in " + dir.string());
      for (const auto& [d, c] : truth.counts[s]) out << d.i << ' ' << d.j << ' ' << c << '\n';
      if (!out) throw IoError("error writing ground truth");
    }
  }
}

GroundTruth read_ground_truth(const std::filesystem::path& dir) {
  GroundTruth truth;
  for (std::size_t s = 1;; ++s) {
    const std::string suffix = std::to_string(s) + ".txt";
    const auto z_path = dir / ("truth_z" + suffix);
    if (!std::filesystem::exists(z_path)) break;
    std::ifstream zin(z_path);
    std::ifstream cin(dir / ("truth_counts" + suffix));
    if (!zin || !cin) throw IoError("cannot read ground truth layer " + std::to_string(s));

    std::vector<std::uint32_t> z;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(zin, line)) {
      ++line_no;
      std::istringstream ls(line);
      std::size_t v = 0;
      std::uint32_t b = 0;
      if (!(ls >> v)) continue;
      if (!(ls >> b) || v != z.size()) throw ParseError(line_no, "bad ground-truth assignment");
      z.push_back(b);
    }
    std::vector<std::pair<Dyad, std::uint32_t>> counts;
    line_no = 0;
    while (std::getline(cin, line)) {
      ++line_no;
      std::istringstream ls(line);
      Vertex i = 0;
      if (!(ls >> i)) continue;
      Vertex j = 0;
      std::uint32_t c = 0;
      if (!(ls >> j >> c)) throw ParseError(line_no, "bad ground-truth count line");
      counts.push_back({make_dyad(i, j), c});
    }
    std::sort(counts.begin(), counts.end());
    truth.assignments.push_back(std::move(z));
    truth.counts.push_back(std::move(counts));
  }
  if (truth.assignments.empty()) throw IoError("no ground truth found in " + dir.string());
  return truth;
}

}  // namespace mnsbm

#include "mnsbm/cli.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mnsbm/errors.hpp"
#include "mnsbm/graph_io.hpp"
#include "mnsbm/manifest.hpp"
#include "mnsbm/prediction.hpp"
#include "mnsbm/superposition.hpp"
#include "mnsbm/synth.hpp"
#include "mnsbm/trace_io.hpp"

namespace mnsbm::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_interrupt(int) { g_interrupted.store(true); }

class PhaseTimer {
 public:
  explicit PhaseTimer(RunManifest& m) : manifest_(m) {}
  void start() { begin_ = std::chrono::steady_clock::now(); }
  void stop(const std::string& phase) {
    manifest_.timings[phase] +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - begin_).count();
  }

 private:
  RunManifest& manifest_;
  std::chrono::steady_clock::time_point begin_;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::string fmt_double(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

// ---------------------------------------------------------------- generate

struct GenerateOptions {
  std::size_t n = 0;
  std::size_t k = 0;
  std::optional<std::size_t> shift;
  std::optional<double> lambda;
  std::uint64_t seed = 1;
  std::string out_dir;
};

void generate_into(std::size_t N, std::size_t K, std::size_t shift, std::uint64_t seed,
                   const fs::path& dir) {
  const PlantedModel pm = planted_params(N, K, shift);
  Rng rng = make_stream(seed, StreamTag::kGenerate);
  const SyntheticNetwork net = generate(pm, rng);
  ensure_dir(dir);
  write_graph(net.graph, dir / "graph.txt");
  write_ground_truth(net.truth, dir);
}

int cmd_generate(const GenerateOptions& o, std::ostream& out) {
  RunManifest manifest{"generate", json::object(), kVersion, {}};
  PhaseTimer timer(manifest);
  timer.start();
  if (o.shift && o.lambda) throw ArgumentError("give either --shift or --lambda, not both");
  if (!o.shift && !o.lambda) throw ArgumentError("one of --shift or --lambda is required");
  const std::size_t shift = o.shift ? *o.shift : shift_for_lambda(o.n, o.k, *o.lambda);
  const PlantedModel pm = planted_params(o.n, o.k, shift);
  generate_into(o.n, o.k, shift, o.seed, o.out_dir);
  timer.stop("generate");

  manifest.parameters = {{"n", o.n},
                         {"k", o.k},
                         {"shift", shift},
                         {"lambda_shift", pm.lambda_shift},
                         {"seed", o.seed},
                         {"out_dir", o.out_dir},
                         {"diagonal_1", kPlantedDiagonal1},
                         {"diagonal_2", kPlantedDiagonal2},
                         {"off_diagonal", kPlantedOffDiagonal}};
  write_manifest(manifest, fs::path(o.out_dir) / "manifest.json");
  out << "wrote " << (fs::path(o.out_dir) / "graph.txt").string() << " (shift " << shift
      << ", lambda " << fmt_double(pm.lambda_shift) << ", overlapping vertices "
      << pm.overlapping_vertices() << ")\n";
  return kExitOk;
}

// --------------------------------------------------------------------- fit

struct FitOptions {
  std::string input;
  bool one_based = false;
  std::size_t subnetworks = 1;
  std::size_t iters = 6000;
  std::size_t burnin = 3000;
  std::size_t thin = 10;
  double holdout = 0.05;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out_dir;
  bool record_counts = false;
};

struct FitResult {
  ChainTrace trace;
  std::optional<double> link_auc;
};

FitResult fit_graph(const ObservedGraph& g, const FitOptions& o, RunManifest& manifest) {
  PhaseTimer timer(manifest);
  timer.start();
  HoldoutSplit split{g, {}};
  if (o.holdout > 0.0) {
    Rng rng = make_stream(o.seed, StreamTag::kHoldout);
    split = split_holdout(g, o.holdout, rng);
  }
  timer.stop("split");

  SweepConfig cfg;
  cfg.iterations = o.iters;
  cfg.burn_in = o.burnin;
  cfg.thinning = o.thin;
  cfg.master_seed = o.seed;
  cfg.parallel_workers = o.workers;
  cfg.record_counts = o.record_counts;

  timer.start();
  g_interrupted.store(false);
  auto previous = std::signal(SIGINT, on_interrupt);
  FitResult result;
  result.trace = run_chain(split.train, split.test, o.subnetworks, cfg, &g_interrupted);
  std::signal(SIGINT, previous);
  timer.stop("chain");

  result.trace.manifest = "manifest.json";
  if (!split.test.empty() && !result.trace.records.empty())
    result.link_auc = auc(predict_link_prob(result.trace));
  return result;
}

json fit_parameters(const FitOptions& o, std::size_t n, std::size_t edges) {
  return {{"input", o.input},
          {"one_based", o.one_based},
          {"vertices", n},
          {"edges", edges},
          {"subnetworks", o.subnetworks},
          {"iterations", o.iters},
          {"burn_in", o.burnin},
          {"thinning", o.thin},
          {"holdout_fraction", o.holdout},
          {"seed", o.seed},
          {"workers", o.workers},
          {"record_counts", o.record_counts},
          {"scan_order", "systematic 0..n-1"},
          {"mh_step", 0.1},
          {"initial_hyperparameters", {{"alpha", 2.0}, {"kappa", 2.0}, {"lambda", 2.0}}},
          {"dyad_block_size", kDyadBlockSize},
          {"out_dir", o.out_dir}};
}

void write_fit_outputs(const FitResult& r, const fs::path& dir, RunManifest& manifest) {
  PhaseTimer timer(manifest);
  timer.start();
  write_trace(r.trace, dir / "trace.txt");
  if (!r.trace.heldout.empty() && !r.trace.records.empty())
    write_predictions(predict_link_prob(r.trace), dir / "predictions.csv");
  timer.stop("write");
}

int cmd_fit(const FitOptions& o, std::ostream& out) {
  RunManifest manifest{"fit", json::object(), kVersion, {}};
  PhaseTimer timer(manifest);
  timer.start();
  ParseOptions popts;
  popts.one_based = o.one_based;
  const ObservedGraph g = read_edge_list(o.input, popts);
  timer.stop("read");

  const fs::path dir(o.out_dir);
  ensure_dir(dir);
  const FitResult r = fit_graph(g, o, manifest);
  manifest.parameters = fit_parameters(o, g.n, g.edge_count());
  manifest.parameters["retained_records"] = r.trace.records.size();
  manifest.parameters["interrupted"] =
      r.trace.records.size() <
      ChainTrace::expected_records(o.iters, o.burnin, o.thin);
  write_fit_outputs(r, dir, manifest);
  write_manifest(manifest, dir / "manifest.json");

  if (r.link_auc) out << "auc " << fmt_double(*r.link_auc) << '\n';
  out << "mean_blocks_per_subnetwork " << fmt_double(r.trace.mean_block_count()) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct Summary {
  double mean = 0.0;
  double sdm = 0.0;
};

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  const auto n = static_cast<double>(xs.size());
  for (double x : xs) s.mean += x;
  s.mean /= n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sdm = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

int cmd_evaluate(const std::vector<std::string>& traces, const std::string& out_path,
                 std::ostream& out) {
  struct Group {
    std::vector<double> aucs;
    std::vector<double> blocks;
  };
  std::map<std::size_t, Group> groups;
  std::optional<std::size_t> n;
  for (const auto& path : traces) {
    const ChainTrace t = read_trace(fs::path(path));
    if (n && *n != t.n)
      throw ArgumentError("trace " + path + " has " + std::to_string(t.n) +
                          " vertices, others have " + std::to_string(*n));
    n = t.n;
    if (t.heldout.empty()) throw ArgumentError("trace " + path + " has no held-out dyads");
    Group& g = groups[t.S];
    g.aucs.push_back(auc(predict_link_prob(t)));
    g.blocks.push_back(t.mean_block_count());
  }

  std::ostringstream csv;
  csv << "S,mean_auc,sdm,mean_L\n";
  for (const auto& [S, g] : groups) {
    const Summary a = summarize(g.aucs);
    const Summary l = summarize(g.blocks);
    csv << S << ',' << fmt_double(a.mean) << ',' << fmt_double(a.sdm) << ',' << fmt_double(l.mean)
        << '\n';
  }
  if (out_path.empty()) {
    out << csv.str();
  } else {
    std::ofstream f(out_path);
    if (!f || !(f << csv.str())) throw IoError("cannot write " + out_path);
  }
  return kExitOk;
}

// ------------------------------------------------------------ experiments

struct GridOptions {
  std::vector<std::size_t> k_list{3, 4, 5};
  std::vector<double> lambda_grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::size_t restarts = 20;
  std::vector<std::size_t> s_list{1, 2, 3};
  std::uint64_t seed = 1;
  std::size_t iters = 3000;
  std::size_t burnin = 2500;
  std::size_t thin = 1;
  double holdout = 0.0;
  std::string out_dir;
};

std::string run_dir_name(const ExperimentRun& r) {
  return "K" + std::to_string(r.K) + "_m" + std::to_string(r.shift) + "_r" +
         std::to_string(r.restart);
}

int cmd_grid(const GridOptions& o, std::ostream& out) {
  const auto runs = experiment_grid(o.k_list, o.lambda_grid, o.restarts, o.s_list, o.seed);
  json doc;
  doc["command"] = "grid";
  doc["version"] = kVersion;
  doc["master_seed"] = o.seed;
  doc["iterations"] = o.iters;
  doc["burn_in"] = o.burnin;
  doc["thinning"] = o.thin;
  doc["holdout_fraction"] = o.holdout;
  doc["runs"] = json::array();
  for (const auto& r : runs) {
    const std::string data_dir = run_dir_name(r);
    doc["runs"].push_back({{"K", r.K},
                           {"N", r.N},
                           {"lambda", r.lambda},
                           {"shift", r.shift},
                           {"restart", r.restart},
                           {"S", r.S},
                           {"data_seed", r.data_seed},
                           {"chain_seed", r.chain_seed},
                           {"data_dir", data_dir},
                           {"trace", data_dir + "/S" + std::to_string(r.S) + "/trace.txt"}});
  }
  ensure_dir(o.out_dir);
  const fs::path path = fs::path(o.out_dir) / "experiment.json";
  std::ofstream f(path);
  if (!f || !(f << doc.dump(2) << '\n')) throw IoError("cannot write " + path.string());
  out << "wrote " << path.string() << " with " << runs.size() << " runs\n";
  return kExitOk;
}

json load_experiment(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open experiment manifest " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ArgumentError("malformed experiment manifest: " + std::string(e.what()));
  }
}

int cmd_run_grid(const std::string& manifest_path, int workers, std::ostream& out) {
  const json doc = load_experiment(manifest_path);
  const fs::path root = fs::path(manifest_path).parent_path();
  for (const auto& run : doc.at("runs")) {
    const fs::path data_dir = root / run.at("data_dir").get<std::string>();
    if (!fs::exists(data_dir / "graph.txt"))
      generate_into(run.at("N"), run.at("K"), run.at("shift"), run.at("data_seed"), data_dir);
    FitOptions o;
    o.input = (data_dir / "graph.txt").string();
    o.subnetworks = run.at("S");
    o.iters = doc.at("iterations");
    o.burnin = doc.at("burn_in");
    o.thin = doc.at("thinning");
    o.holdout = doc.at("holdout_fraction");
    o.seed = run.at("chain_seed");
    o.workers = workers;
    o.record_counts = true;
    const fs::path trace_path = root / run.at("trace").get<std::string>();
    o.out_dir = trace_path.parent_path().string();
    std::ostringstream sink;
    cmd_fit(o, sink);
    out << run.at("trace").get<std::string>() << ' ' << sink.str().substr(0, sink.str().find('\n'))
        << '\n';
  }
  return kExitOk;
}

// -------------------------------------------------------------- similarity

struct SimilarityOptions {
  std::string manifest;
  std::string trace;
  std::string truth_dir;
  std::size_t k = 0;
  double lambda = 0.0;
  std::size_t window = 500;
  std::string out_path;
};

int cmd_similarity(const SimilarityOptions& o, std::ostream& out) {
  std::ostringstream csv;
  csv << "K,lambda,S,structure_auc\n";
  auto row = [&](std::size_t K, double lambda, const fs::path& trace_path,
                 const fs::path& truth_dir) {
    if (!fs::exists(truth_dir / "truth_z1.txt"))
      throw ArgumentError("missing ground truth in " + truth_dir.string());
    const ChainTrace t = read_trace(trace_path);
    const GroundTruth truth = read_ground_truth(truth_dir);
    const double value = structure_auc(same_block_vectors(truth, t, o.window));
    csv << K << ',' << fmt_double(lambda) << ',' << t.S << ',' << fmt_double(value) << '\n';
  };

  if (!o.manifest.empty()) {
    const json doc = load_experiment(o.manifest);
    const fs::path root = fs::path(o.manifest).parent_path();
    for (const auto& run : doc.at("runs"))
      row(run.at("K"), run.at("lambda"), root / run.at("trace").get<std::string>(),
          root / run.at("data_dir").get<std::string>());
  } else {
    if (o.trace.empty()) throw ArgumentError("give --manifest or --trace");
    if (o.truth_dir.empty()) throw ArgumentError("missing ground truth: --truth-dir is required");
    row(o.k, o.lambda, o.trace, o.truth_dir);
  }
  if (o.out_path.empty()) {
    out << csv.str();
  } else {
    std::ofstream f(o.out_path);
    if (!f || !(f << csv.str())) throw IoError("cannot write " + o.out_path);
  }
  return kExitOk;
}

// Splices "key=value" lines of the file named by --config into `args` as
// "--key value" unless the command line already sets --key. Blank lines and
// lines starting with '#' are ignored; "key=true" becomes a bare flag.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t k = 1; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) {
      path = args[k + 1];
      args.erase(args.begin() + k, args.begin() + k + 2);
      break;
    }
    if (args[k].starts_with("--config=")) {
      path = args[k].substr(9);
      args.erase(args.begin() + k);
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  auto given = [&](const std::string& flag) {
    for (const auto& a : args)
      if (a == flag || a.starts_with(flag + "=")) return true;
    return false;
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key=value in " + path);
    auto trim = [](std::string v) {
      const auto b = v.find_first_not_of(" \t\r");
      const auto e = v.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string flag = "--" + key;
    if (key.empty() || given(flag)) continue;
    if (value == "true") {
      args.push_back(flag);
    } else if (value != "false") {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  std::string config_path;  // consumed by expand_config; declared for --help
  CLI::App app{"Multi-network stochastic blockmodel inference", "mnsbm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  GenerateOptions gen;
  auto* generate_cmd = app.add_subcommand("generate", "Sample a planted two-subnetwork graph");
  generate_cmd->add_option("--config", config_path, "key=value file; flags take precedence");
  generate_cmd->add_option("--n", gen.n, "Vertex count (multiple of K)")->required();
  generate_cmd->add_option("--k", gen.k, "Blocks per subnetwork")->required();
  auto* shift_opt = generate_cmd->add_option("--shift", gen.shift, "Circular shift m");
  auto* lambda_opt = generate_cmd->add_option("--lambda", gen.lambda, "Overlap 2Km/N");
  shift_opt->excludes(lambda_opt);
  generate_cmd->add_option("--seed", gen.seed)->envname("MNSBM_SEED");
  generate_cmd->add_option("--out-dir", gen.out_dir)->required();

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Run the sampler on an edge list");
  fit_cmd->add_option("--config", config_path, "key=value file; flags take precedence");
  fit_cmd->add_option("--input", fit.input, "Edge list")->required();
  fit_cmd->add_flag("--one-based", fit.one_based, "Input vertex ids start at 1");
  fit_cmd->add_option("--subnetworks", fit.subnetworks, "S")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--iters", fit.iters)->check(CLI::PositiveNumber);
  fit_cmd->add_option("--burnin", fit.burnin);
  fit_cmd->add_option("--thin", fit.thin)->check(CLI::PositiveNumber);
  fit_cmd->add_option("--holdout", fit.holdout, "Held-out link fraction, 0 disables");
  fit_cmd->add_option("--seed", fit.seed)->envname("MNSBM_SEED");
  fit_cmd->add_option("--workers", fit.workers)->check(CLI::PositiveNumber);
  fit_cmd->add_option("--out-dir", fit.out_dir)->required();
  fit_cmd->add_flag("--record-counts", fit.record_counts,
                    "Store per-dyad latent counts in the trace");

  std::vector<std::string> eval_traces;
  std::string eval_out;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Link-prediction AUC per S");
  evaluate_cmd->add_option("traces", eval_traces, "Trace files")->required();
  evaluate_cmd->add_option("--out", eval_out, "CSV path (default stdout)");

  SimilarityOptions sim;
  auto* similarity_cmd = app.add_subcommand("similarity", "Structure AUC against ground truth");
  similarity_cmd->add_option("--manifest", sim.manifest, "experiment.json from 'grid'");
  similarity_cmd->add_option("--trace", sim.trace);
  similarity_cmd->add_option("--truth-dir", sim.truth_dir);
  similarity_cmd->add_option("--k", sim.k);
  similarity_cmd->add_option("--lambda", sim.lambda);
  similarity_cmd->add_option("--window", sim.window, "Trailing iterations averaged");
  similarity_cmd->add_option("--out", sim.out_path, "CSV path (default stdout)");

  GridOptions grid;
  auto* grid_cmd = app.add_subcommand("grid", "Write a synthetic experiment manifest");
  grid_cmd->add_option("--config", config_path, "key=value file; flags take precedence");
  grid_cmd->add_option("--k", grid.k_list)->delimiter(',');
  grid_cmd->add_option("--lambda", grid.lambda_grid)->delimiter(',');
  grid_cmd->add_option("--restarts", grid.restarts);
  grid_cmd->add_option("--subnetworks", grid.s_list)->delimiter(',');
  grid_cmd->add_option("--seed", grid.seed)->envname("MNSBM_SEED");
  grid_cmd->add_option("--iters", grid.iters)->check(CLI::PositiveNumber);
  grid_cmd->add_option("--burnin", grid.burnin);
  grid_cmd->add_option("--thin", grid.thin)->check(CLI::PositiveNumber);
  grid_cmd->add_option("--holdout", grid.holdout);
  grid_cmd->add_option("--out-dir", grid.out_dir)->required();

  std::string run_manifest;
  int run_workers = 1;
  auto* run_grid_cmd = app.add_subcommand("run-grid", "Generate and fit every run of a manifest");
  run_grid_cmd->add_option("--manifest", run_manifest)->required();
  run_grid_cmd->add_option("--workers", run_workers)->check(CLI::PositiveNumber);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::FileError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*generate_cmd) return cmd_generate(gen, out);
    if (*fit_cmd) return cmd_fit(fit, out);
    if (*evaluate_cmd) return cmd_evaluate(eval_traces, eval_out, out);
    if (*similarity_cmd) return cmd_similarity(sim, out);
    if (*grid_cmd) return cmd_grid(grid, out);
    if (*run_grid_cmd) return cmd_run_grid(run_manifest, run_workers, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace mnsbm::cli

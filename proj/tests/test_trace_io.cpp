#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "mnsbm/errors.hpp"
#include "mnsbm/superposition.hpp"
#include "mnsbm/synth.hpp"
#include "mnsbm/trace_io.hpp"

namespace mnsbm {
namespace {

ChainTrace sample_trace(bool counts) {
  Rng rng(1);
  const SyntheticNetwork net = generate(planted_params(30, 3, 2), rng);
  Rng split_rng(2);
  const HoldoutSplit split = split_holdout(net.graph, 0.1, split_rng);
  SweepConfig cfg;
  cfg.iterations = 20;
  cfg.burn_in = 5;
  cfg.thinning = 4;
  cfg.master_seed = 3;
  cfg.record_counts = counts;
  ChainTrace t = run_chain(split.train, split.test, 2, cfg);
  t.manifest = "manifest.json";
  return t;
}

TEST(TraceIo, RoundTripIsExact) {
  for (bool counts : {false, true}) {
    const ChainTrace t = sample_trace(counts);
    ASSERT_EQ(t.records.size(), ChainTrace::expected_records(20, 5, 4));
    std::stringstream buf;
    write_trace(t, buf);
    EXPECT_EQ(read_trace(buf), t);
  }
}

TEST(TraceIo, RewriteIsByteIdentical) {
  const ChainTrace t = sample_trace(true);
  std::stringstream first, second;
  write_trace(t, first);
  write_trace(read_trace(first), second);
  EXPECT_EQ(first.str(), second.str());
}

TEST(TraceIo, RejectsForeignAndTruncatedInput) {
  std::stringstream foreign("not a trace\n");
  EXPECT_THROW(read_trace(foreign), ParseError);
  std::stringstream full;
  write_trace(sample_trace(false), full);
  const std::string text = full.str();
  std::stringstream cut(text.substr(0, text.size() / 2));
  EXPECT_THROW(read_trace(cut), ParseError);
}

TEST(TraceIo, MissingFileIsIoError) {
  EXPECT_THROW(read_trace(std::filesystem::path("/nonexistent/trace.txt")), IoError);
}

TEST(GroundTruthIo, RoundTrip) {
  Rng rng(4);
  const SyntheticNetwork net = generate(planted_params(30, 3, 2), rng);
  const auto dir = std::filesystem::temp_directory_path() / "mnsbm_truth_test";
  std::filesystem::create_directories(dir);
  write_ground_truth(net.truth, dir);
  const GroundTruth back = read_ground_truth(dir);
  EXPECT_EQ(back.assignments, net.truth.assignments);
  EXPECT_EQ(back.counts, net.truth.counts);
  std::filesystem::remove_all(dir);
  EXPECT_THROW(read_ground_truth(dir), IoError);
}

}  // namespace
}  // namespace mnsbm

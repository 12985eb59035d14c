#pragma once

#include <filesystem>
#include <iosfwd>

#include "mnsbm/prediction.hpp"
#include "mnsbm/trace.hpp"

namespace mnsbm {

// Line-oriented text format, header "mnsbm-trace 1". Doubles are written
// in shortest round-trip form so read(write(t)) == t exactly.
void write_trace(const ChainTrace& trace, std::ostream& out);
void write_trace(const ChainTrace& trace, const std::filesystem::path& path);
ChainTrace read_trace(std::istream& in);
ChainTrace read_trace(const std::filesystem::path& path);

// Ground truth files: "vertex block" per layer and "i j count" per layer.
void write_ground_truth(const GroundTruth& truth, const std::filesystem::path& dir);
GroundTruth read_ground_truth(const std::filesystem::path& dir);

}  // namespace mnsbm

#include "mnsbm/trace.hpp"

#include <algorithm>

namespace mnsbm {

std::size_t ChainRecord::block_count(std::size_t s) const {
  const auto& z = assignments.at(s);
  return z.empty() ? 0 : static_cast<std::size_t>(*std::max_element(z.begin(), z.end())) + 1;
}

std::size_t ChainTrace::expected_records(std::size_t iterations, std::size_t burn_in,
                                         std::size_t thinning) {
  if (iterations <= burn_in || thinning == 0) return 0;
  return (iterations - burn_in + thinning - 1) / thinning;
}

double ChainTrace::mean_block_count() const {
  double sum = 0.0;
  std::size_t terms = 0;
  for (const auto& rec : records) {
    for (std::size_t s = 0; s < rec.assignments.size(); ++s) {
      sum += static_cast<double>(rec.block_count(s));
      ++terms;
    }
  }
  return terms == 0 ? 0.0 : sum / static_cast<double>(terms);
}

}  // namespace mnsbm

#pragma once

#include <cmath>
#include <span>

#include "mnsbm/rng.hpp"

namespace mnsbm {

// log Γ(x) for x > 0. Lanczos below 10, Stirling series above; relative
// error under 1e-13 on (0, 1e7].
double log_gamma(double x);

// Log density of the Gamma(shape 2, rate 1) prior, p(x) = x e^{-x}.
inline double log_gamma21_prior(double x) { return std::log(x) - x; }

// Samples an index with probability proportional to exp(log_weights[k]).
// The span is overwritten with unnormalised cumulative weights.
std::size_t sample_log_categorical(std::span<double> log_weights, Rng& rng);

}  // namespace mnsbm

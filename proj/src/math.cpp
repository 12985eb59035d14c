#include "mnsbm/math.hpp"

#include <algorithm>
#include <array>
#include <numbers>

namespace mnsbm {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

// Lanczos approximation, g = 7, n = 9.
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double log_gamma_lanczos(double x) {
  const double xm1 = x - 1.0;
  double a = kLanczos[0];
  for (std::size_t k = 1; k < kLanczos.size(); ++k) a += kLanczos[k] / (xm1 + static_cast<double>(k));
  const double t = xm1 + 7.5;
  return kHalfLog2Pi + (xm1 + 0.5) * std::log(t) - t + std::log(a);
}

double log_gamma_stirling(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv * (1.0 / 12.0 -
             inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
  return (x - 0.5) * std::log(x) - x + kHalfLog2Pi + series;
}

}  // namespace

double log_gamma(double x) {
  if (x < 0.5) {
    // reflection keeps the Lanczos sum away from its poles
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma_lanczos(1.0 - x);
  }
  if (x < 10.0) return log_gamma_lanczos(x);
  return log_gamma_stirling(x);
}

std::size_t sample_log_categorical(std::span<double> log_weights, Rng& rng) {
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  double total = 0.0;
  for (double& w : log_weights) {
    total += std::exp(w - top);
    w = total;
  }
  const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  const auto it = std::upper_bound(log_weights.begin(), log_weights.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - log_weights.begin()),
                               log_weights.size() - 1);
}

}  // namespace mnsbm

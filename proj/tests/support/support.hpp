#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "effcon/reduction.hpp"

namespace effcon::testing {

inline double relative(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Physical state with moments of order ħ and a strict uncertainty margin.
inline ReducedState random_state(std::mt19937_64& rng, double hbar, double range = 3.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ReducedState r;
  r.t = 0.0;
  r.q = range * (2.0 * u(rng) - 1.0);
  r.p = range * (2.0 * u(rng) - 1.0);
  r.dq2 = hbar * (0.6 + 1.4 * u(rng));
  r.dp2 = hbar * (0.6 + 1.4 * u(rng));
  const double room = std::sqrt(r.dq2 * r.dp2 - 0.25 * hbar * hbar);
  r.dqp = room * 0.9 * (2.0 * u(rng) - 1.0);
  return r;
}

}  // namespace effcon::testing

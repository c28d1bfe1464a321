#pragma once

#include <functional>
#include <vector>

namespace effcon {

/// Nodes and weights for ∫ e^{−x²} f(x) dx.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub–Welsch rule of the given order; cached and thread-safe.
const GaussHermiteRule& gauss_hermite(std::size_t order);

struct QuadratureOptions {
  std::size_t start_order = 64;
  std::size_t max_order = 4096;
  double tolerance = 1e-13;
};

/// E[f(X)] for X ~ N(mean, variance), doubling the order until two
/// successive estimates agree. Throws QuadratureFailure otherwise.
double gaussian_expectation(const std::function<double(double)>& f, double mean, double variance,
                            const QuadratureOptions& opts = {});

/// ⟨√(p̂² + m²)⟩ for a Gaussian momentum distribution.
double sqrt_mass_shell_expectation(double p_mean, double dp2, double m, const QuadratureOptions& opts = {});

}  // namespace effcon

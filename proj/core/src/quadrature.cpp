#include "effcon/quadrature.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "effcon/errors.hpp"

namespace effcon {

namespace {

GaussHermiteRule build_rule(std::size_t n) {
  // Jacobi matrix of the Hermite weight: zero diagonal, off-diagonal √(k/2).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n - 1));
  for (std::size_t k = 1; k < n; ++k) sub[static_cast<Eigen::Index>(k - 1)] = std::sqrt(0.5 * static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw QuadratureFailure("tridiagonal eigensolver failed");

  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double p0 = std::pow(M_PI, -0.25);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
    // Christoffel weight 1 / Σ p_k(x)² over the orthonormal Hermite
    // polynomials, rescaled on the fly so large |x| does not overflow.
    double prev = 0.0;
    double cur = p0;
    double log_scale = 0.0;
    double sum = cur * cur;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double next = std::sqrt(2.0 / static_cast<double>(k + 1)) * x * cur -
                          std::sqrt(static_cast<double>(k) / static_cast<double>(k + 1)) * prev;
      prev = cur;
      cur = next;
      sum += cur * cur;
      if (sum > 1e200) {
        prev *= 1e-100;
        cur *= 1e-100;
        sum *= 1e-200;
        log_scale += 200.0 * std::log(10.0);
      }
    }
    rule.nodes[i] = x;
    rule.weights[i] = std::exp(-std::log(sum) - log_scale);
  }
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(std::size_t order) {
  if (order < 2) throw QuadratureFailure("Gauss–Hermite order must be at least 2");
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<GaussHermiteRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussHermiteRule>(build_rule(order));
  return *slot;
}

double gaussian_expectation(const std::function<double(double)>& f, double mean, double variance,
                            const QuadratureOptions& opts) {
  if (!(variance >= 0.0)) throw QuadratureFailure("variance must be non-negative");
  if (variance == 0.0) return f(mean);
  const double scale = std::sqrt(2.0 * variance);
  auto estimate = [&](std::size_t n) {
    const GaussHermiteRule& rule = gauss_hermite(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += rule.weights[i] * f(mean + scale * rule.nodes[i]);
    return acc / std::sqrt(M_PI);
  };
  double previous = estimate(opts.start_order);
  for (std::size_t n = 2 * opts.start_order; n <= opts.max_order; n *= 2) {
    const double current = estimate(n);
    if (std::abs(current - previous) <= opts.tolerance * std::max(1.0, std::abs(current))) return current;
    previous = current;
  }
  throw QuadratureFailure(
      fmt::format("Gauss–Hermite did not reach {} self-consistency by order {}", opts.tolerance, opts.max_order));
}

double sqrt_mass_shell_expectation(double p_mean, double dp2, double m, const QuadratureOptions& opts) {
  if (!(dp2 > 0.0)) throw DomainError("sqrt_mass_shell_expectation needs dp2 > 0");
  const double m2 = m * m;
  return gaussian_expectation([m2](double p) { return std::sqrt(p * p + m2); }, p_mean, dp2, opts);
}

}  // namespace effcon

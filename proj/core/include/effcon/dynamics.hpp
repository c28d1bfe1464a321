#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "effcon/models.hpp"
#include "effcon/reduction.hpp"

namespace effcon {

/// Time derivative of a reduced state; `t` holds dt/dtime = 1.
using StateDerivative = ReducedState;

/// Hand-coded right-hand side generated by the first-order expansion of E.
StateDerivative effective_rhs(const ModelSpec& model, const ReducedState& r, Branch sign = Branch::plus);

/// Same flow from the base bracket table: Σ_b {X, b} ∂E/∂b with the
/// gradient of the expanded E taken by forward-mode jets.
StateDerivative effective_rhs_generic(const ModelSpec& model, const ReducedState& r, const AlgebraContext& ctx,
                                      Branch sign = Branch::plus);

enum class Method { fixed_rk4, adaptive_rk45 };
enum class BreakdownPolicy { stop, flag_and_continue };

struct IntegratorOptions {
  Method method = Method::fixed_rk4;
  double step = 0.01;
  double rtol = 1e-9;
  double atol = 1e-12;
  BreakdownPolicy breakdown = BreakdownPolicy::flag_and_continue;
  /// A sample is flagged once a moment exceeds this multiple of the squared
  /// classical scale max(|q₀|, |p₀|, m).
  double moment_bound = 0.1;
  /// Relative tolerance for the uncertainty check.
  double admissibility_tolerance = 1e-9;
  /// Record every k-th step (fixed) or every `step` (adaptive).
  std::size_t sample_every = 1;
};

void validate(const IntegratorOptions& opts);

enum SampleFlags : std::uint32_t {
  kInadmissible = 1U << 0,
  kMomentBound = 1U << 1,
};

struct Sample {
  double time = 0.0;
  ReducedState state;
  double E = 0.0;
  std::uint32_t flags = 0;
};

struct Trajectory {
  ModelSpec model;
  Branch sign = Branch::plus;
  IntegratorOptions options;
  double hbar = 1.0;
  std::vector<Sample> samples;
  /// Index of the first flagged sample, if any.
  std::optional<std::size_t> breakdown_index;
};

Trajectory integrate(const ModelSpec& model, const ReducedState& r0, std::pair<double, double> t_span,
                     const AlgebraContext& ctx, const IntegratorOptions& opts = {}, Branch sign = Branch::plus);

/// q(t) = A sin(t/H) + B cos(t/H), p(t) = A cos(t/H) − B sin(t/H).
std::vector<std::pair<double, double>> classical_trajectory(const QuadraticPotential& model, double A, double B,
                                                            const std::vector<double>& times);

}  // namespace effcon

#pragma once

#include <array>
#include <complex>

#include "effcon/poly_expr.hpp"
#include "effcon/variables.hpp"

namespace effcon {

/// Holds the value of ħ used when polynomials are evaluated on states.
class AlgebraContext {
 public:
  AlgebraContext() = default;
  explicit AlgebraContext(double hbar);

  double hbar() const { return hbar_; }

 private:
  double hbar_ = 1.0;
};

/// Point of the truncated quantum phase space: all 14 variables assigned,
/// complex-valued (solved p_t-moments carry imaginary parts).
class MomentState {
 public:
  explicit MomentState(AlgebraContext ctx = {}) : ctx_(ctx) {}
  MomentState(const std::array<Complex, kNumVars>& values, AlgebraContext ctx)
      : values_(values), ctx_(ctx) {}

  Complex operator[](Var v) const { return values_[index(v)]; }
  Complex& operator[](Var v) { return values_[index(v)]; }

  const std::array<Complex, kNumVars>& values() const { return values_; }
  const AlgebraContext& context() const { return ctx_; }
  double hbar() const { return ctx_.hbar(); }

 private:
  std::array<Complex, kNumVars> values_{};
  AlgebraContext ctx_;
};

/// Poisson bracket of two phase-space coordinates. Canonical pairs give ±1,
/// expectation values commute with moments, and two moments give a linear
/// combination of moments.
PolyExpr base_bracket(Var a, Var b);

/// Bilinear, antisymmetric extension of base_bracket through the Leibniz rule.
PolyExpr bracket(const PolyExpr& a, const PolyExpr& b);

Complex evaluate(const PolyExpr& expr, const MomentState& s);

/// Numerical values of every base bracket on a state; row a, column b holds
/// {a, b}(s).
using StructureMatrix = std::array<std::array<Complex, kNumVars>, kNumVars>;
StructureMatrix structure_matrix(const MomentState& s);

using Gradient = std::array<Complex, kNumVars>;

/// Bracket of two arbitrary functions evaluated on a state from their
/// gradients: Σ ∂f/∂a {a,b} ∂g/∂b. This is the chain-rule form of the
/// Leibniz extension and is exact for non-polynomial functions such as E.
Complex bracket_from_gradients(const Gradient& df, const Gradient& dg, const StructureMatrix& omega);

}  // namespace effcon

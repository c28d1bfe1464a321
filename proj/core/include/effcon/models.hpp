#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "effcon/moment_algebra.hpp"
#include "effcon/poly_expr.hpp"

namespace effcon {

struct FreeMassive {
  double m = 0.0;
};

/// m = 0 free particle; E = |p|.
struct Massless {};

/// Constraint p_t² − p² − q² − m².
struct QuadraticPotential {
  double m = 0.0;
};

/// Potential λt in the constraint.
struct LinearTimePotential {
  double m = 0.0;
  double lambda = 0.0;
};

/// Potential V(0) + λṼ(t). vtilde[k] multiplies t^(k+1); V(0) is v0 and is
/// folded into the mass, m_eff² = m² − v0.
struct SlowPolynomialPotential {
  double m = 0.0;
  double lambda = 0.0;
  double v0 = 0.0;
  std::vector<double> vtilde{1.0};
};

using ModelSpec =
    std::variant<FreeMassive, Massless, QuadraticPotential, LinearTimePotential, SlowPolynomialPotential>;

/// Throws DomainError on negative or non-finite parameters.
void validate(const ModelSpec& model);

std::string model_name(const ModelSpec& model);

bool is_time_dependent(const ModelSpec& model);

/// m² with constant potential pieces absorbed.
double effective_mass_squared(const ModelSpec& model);

/// Time-dependent part of the potential at gauge time t: λt or λṼ(t).
double time_potential(const ModelSpec& model, double t);
double time_potential_derivative(const ModelSpec& model, double t);

enum class ClosureExpectation { exact, order_hbar };

enum class ConstraintIndex { C, Ct, Cpt, Cq, Cp };
inline constexpr std::size_t kNumConstraints = 5;
std::string_view constraint_name(std::size_t i);

struct ConstraintSet {
  PolyExpr C, C_t, C_pt, C_q, C_p;
  ModelSpec model;
  ClosureExpectation closure_expectation = ClosureExpectation::exact;
  /// Coefficients of λ in each constraint (zero for time-independent models).
  /// The printed constraint is lambda0[i] + λ·lambda1[i].
  std::array<PolyExpr, kNumConstraints> lambda0;
  std::array<PolyExpr, kNumConstraints> lambda1;

  std::array<PolyExpr, kNumConstraints> all() const { return {C, C_t, C_pt, C_q, C_p}; }
};

ConstraintSet build_constraints(const ModelSpec& model);

struct ClosureEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  /// 0 for the λ-independent algebra, 1 for the part linear in λ.
  unsigned lambda_order = 0;
  PolyExpr bracket;
  PolyExpr combination;
  PolyExpr residual;
  PolyExpr expected_residual;
  bool matches_expected = true;
  unsigned min_grade = 0;
};

struct ClosureReport {
  std::string model;
  ClosureExpectation verdict = ClosureExpectation::exact;
  std::vector<ClosureEntry> entries;

  /// 5×5 text grid of residuals (rows = first argument), one block per
  /// λ order.
  std::string to_table() const;
};

/// Computes every ordered constraint bracket, subtracts the tabulated
/// combination and grades what is left. Throws MalformedTable when a
/// residual is neither the tabulated one nor of high enough grade.
ClosureReport closure_report(const ConstraintSet& cs);

/// Tabulated combination for {C_row, C_col}: coefficient polynomials
/// multiplying each of the five constraints, and the explicit residual.
struct ClosureCell {
  std::array<PolyExpr, kNumConstraints> coefficients;
  PolyExpr residual;
};
using ClosureTable = std::array<std::array<ClosureCell, kNumConstraints>, kNumConstraints>;

const ClosureTable& free_closure_table();
const ClosureTable& quadratic_closure_table();

/// Lorentz boost with velocity v: (p_t, p) contravariant, (t, q) covariant,
/// moments through the induced bilinear action. Throws InvalidVelocity.
MomentState boost(const MomentState& s, double v);

double velocity_addition(double v1, double v2);

}  // namespace effcon

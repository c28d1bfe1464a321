#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

#include "effcon/models.hpp"
#include "effcon/moment_algebra.hpp"

namespace effcon {

/// Physical sector plus gauge time.
struct ReducedState {
  double t = 0.0;
  double q = 0.0;
  double p = 0.0;
  double dq2 = 0.0;
  double dqp = 0.0;
  double dp2 = 0.0;

  friend bool operator==(const ReducedState&, const ReducedState&) = default;
};

/// `plus` is C₁ = p_t + E, i.e. p_t = −E (positive frequency).
enum class Branch { plus, minus };

/// p_t = sigma(b)·E.
constexpr double sigma(Branch b) { return b == Branch::plus ? -1.0 : 1.0; }

struct SolvedSector {
  Branch sign = Branch::plus;
  double E = 0.0;
  double pt = 0.0;
  Complex dtpt;
  double dpt2 = 0.0;
  Complex dptq;
  Complex dptp;
};

/// Closed-form E at gauge time r.t. Throws DomainError outside its domain.
double energy(const ModelSpec& model, const ReducedState& r);

/// E truncated at first order in the moments.
double energy_expanded(const ModelSpec& model, const ReducedState& r);

/// m + (p² + (Δp)²)/(2m).
double energy_nonrelativistic(double m, const ReducedState& r);

/// Both roots of the quadratic in (Δp_t)²; `minus` is the semiclassical one.
struct DptRoots {
  double minus = 0.0;
  double plus = 0.0;
};
DptRoots dpt2_roots(const ModelSpec& model, const ReducedState& r);

/// Largest (Δp_t)² compatible with the hierarchy: κ times the physical
/// moment scale of the model.
double hierarchy_bound(const ModelSpec& model, const ReducedState& r, double kappa);

struct SolveOptions {
  double kappa = 10.0;
};

/// Solves the p_t-sector in the standard gauge (Δt)² = Δ(tq) = Δ(tp) = 0.
SolvedSector solve_pt_sector(const ModelSpec& model, const ReducedState& r, Branch sign, const AlgebraContext& ctx,
                             const SolveOptions& opts = {});

/// Full 14-variable state on the gauge-fixed surface.
MomentState lift(const ReducedState& r, const SolvedSector& sector, const AlgebraContext& ctx);

struct PreGaugeMoments {
  double dt2 = 0.0;
  double dtq = 0.0;
  double dtp = 0.0;
};

/// All four roots of the quartic in p_t for the linear time potential.
std::array<Complex, 4> solve_quartic_pt(const LinearTimePotential& model, const ReducedState& r,
                                        const AlgebraContext& ctx, const PreGaugeMoments& gauge = {});

using DiracMatrix = Eigen::Matrix<Complex, 6, 6>;

/// Bracket matrix of (C₂, C₃, C₄, (Δt)², Δ(tq), Δ(tp)) on the gauge-fixed
/// surface of the chosen branch.
DiracMatrix dirac_matrix(const ModelSpec& model, const ReducedState& r, Branch sign, const AlgebraContext& ctx);

/// −4ħ²[ħ⁴/16 + Δ(qp)⁴ + 2((Δp)²(Δq)² − ħ²/4)((Δp)²(Δq)² − Δ(qp)²)].
double dirac_determinant(const ReducedState& r, const AlgebraContext& ctx);

/// Determinant of the bracket matrix in factored form:
/// −4ħ²(ħ²/4 + Δ(qp)² − (Δq)²(Δp)²)².
double dirac_determinant_factored(const ReducedState& r, const AlgebraContext& ctx);

enum class Violation { none, reality, positivity_q, positivity_p, uncertainty };

struct Admissibility {
  Violation violation = Violation::none;
  bool ok() const { return violation == Violation::none; }
  std::string message() const;
};

/// Reality, positivity and uncertainty. `tolerance` is relative to ħ²/4 for
/// the uncertainty bound and absolute for positivity.
Admissibility check_admissible(const ReducedState& r, const AlgebraContext& ctx, double tolerance = 1e-12);

}  // namespace effcon

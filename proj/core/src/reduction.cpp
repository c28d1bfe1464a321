#include "effcon/reduction.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "effcon/errors.hpp"
#include "effcon/jet.hpp"

namespace effcon {

namespace {

constexpr Complex kI{0.0, 1.0};

bool is_massless(const ModelSpec& m) { return std::holds_alternative<Massless>(m); }
bool is_quadratic(const ModelSpec& m) { return std::holds_alternative<QuadraticPotential>(m); }

double massless_scale(const ReducedState& r) { return std::max({1.0, std::abs(r.q), std::sqrt(std::abs(r.dp2))}); }

void require_moving(const ReducedState& r) {
  if (std::abs(r.p) < 1e-12 * massless_scale(r)) {
    throw DomainError("massless model is undefined at p = 0");
  }
}

// Mass term of the free-type models at gauge time t.
double mass_term(const ModelSpec& model, double t) { return effective_mass_squared(model) - time_potential(model, t); }

// S and K of the quadratic (Δp_t)⁴ − S(Δp_t)² + K = 0.
struct Quadratic {
  double S;
  double K;
};

Quadratic sector_quadratic(const ModelSpec& model, const ReducedState& r) {
  if (is_quadratic(model)) {
    const double m2 = effective_mass_squared(model);
    return {r.p * r.p + r.q * r.q + m2 + r.dp2 + r.dq2,
            r.p * r.p * r.dp2 + 2.0 * r.q * r.p * r.dqp + r.q * r.q * r.dq2};
  }
  return {r.p * r.p + mass_term(model, r.t) + r.dp2, r.p * r.p * r.dp2};
}

double checked_root_discriminant(const Quadratic& a) {
  if (!(a.S > 0.0)) {
    throw DomainError(fmt::format("energy radicand {} is not positive (outside the slowly varying regime)", a.S));
  }
  double D = a.S * a.S - 4.0 * a.K;
  if (D < 0.0) {
    if (D < -1e-14 * a.S * a.S) throw DomainError(fmt::format("energy discriminant {} is negative", D));
    D = 0.0;
  }
  return std::sqrt(D);
}

// Solution without the hierarchy test.
SolvedSector solve_unchecked(const ModelSpec& model, const ReducedState& r, Branch sign, const AlgebraContext& ctx) {
  const double s = sigma(sign);
  const double hbar = ctx.hbar();
  SolvedSector out;
  out.sign = sign;
  out.E = energy(model, r);
  out.pt = s * out.E;
  out.dtpt = Complex{0.0, -0.5 * hbar};
  if (is_quadratic(model)) {
    out.dpt2 = dpt2_roots(model, r).minus;
    out.dptq = s * (r.p * r.dqp + 0.5 * kI * hbar * r.p + r.q * r.dq2) / out.E;
    out.dptp = s * (r.p * r.dp2 + r.q * r.dqp - 0.5 * kI * hbar * r.q) / out.E;
    return out;
  }
  const double v = is_massless(model) ? (r.p > 0.0 ? 1.0 : -1.0) : r.p / out.E;
  out.dpt2 = dpt2_roots(model, r).minus;
  out.dptq = s * v * (r.dqp + 0.5 * kI * hbar);
  out.dptp = s * v * r.dp2;
  return out;
}

// E as a jet over the seeded coordinates.
Jet energy_jet(const ModelSpec& model, const std::array<Jet, kNumVars>& x) {
  const Jet& p = x[index(Var::p)];
  if (is_massless(model)) return abs_real(p);
  const Jet& P = x[index(Var::Dp2)];
  Jet S = p * p + P;
  Jet K = p * p * P;
  if (is_quadratic(model)) {
    const Jet& q = x[index(Var::q)];
    const Jet& Q = x[index(Var::Dq2)];
    const Jet& X = x[index(Var::Dqp)];
    S += q * q + Q + Jet(effective_mass_squared(model));
    K += 2.0 * q * p * X + q * q * Q;
  } else {
    const Jet& t = x[index(Var::t)];
    Jet V(time_potential(model, t.v.real()));
    V.d = t.d;
    for (auto& g : V.d) g *= time_potential_derivative(model, t.v.real());
    S += Jet(effective_mass_squared(model)) - V;
  }
  return sqrt(0.5 * (S + sqrt(S * S - 4.0 * K)));
}

}  // namespace

double energy(const ModelSpec& model, const ReducedState& r) {
  if (is_massless(model)) {
    require_moving(r);
    return std::abs(r.p);
  }
  const Quadratic a = sector_quadratic(model, r);
  const double root = checked_root_discriminant(a);
  return std::sqrt(0.5 * (a.S + root));
}

double energy_expanded(const ModelSpec& model, const ReducedState& r) {
  if (is_massless(model)) {
    require_moving(r);
    return std::abs(r.p);
  }
  if (is_quadratic(model)) {
    const double m2 = effective_mass_squared(model);
    const double H2 = r.p * r.p + r.q * r.q + m2;
    if (!(H2 > 0.0)) throw DomainError("p² + q² + m² must be positive");
    const double H = std::sqrt(H2);
    const double corr = (r.q * r.q + m2) * r.dp2 - 2.0 * r.q * r.p * r.dqp + (r.p * r.p + m2) * r.dq2;
    return H * (1.0 + corr / (2.0 * H2 * H2));
  }
  const double M2 = mass_term(model, r.t);
  const double h2 = r.p * r.p + M2;
  if (!(h2 > 0.0)) throw DomainError(fmt::format("p² + m² = {} must be positive", h2));
  const double h = std::sqrt(h2);
  return h * (1.0 + M2 * r.dp2 / (2.0 * h2 * h2));
}

double energy_nonrelativistic(double m, const ReducedState& r) {
  if (!(m > 0.0)) throw DomainError("non-relativistic limit needs m > 0");
  return m + (r.p * r.p + r.dp2) / (2.0 * m);
}

DptRoots dpt2_roots(const ModelSpec& model, const ReducedState& r) {
  if (is_massless(model)) return {r.dp2, r.p * r.p};
  const Quadratic a = sector_quadratic(model, r);
  const double root = checked_root_discriminant(a);
  const double big = 0.5 * (a.S + root);
  // Small root through Vieta to avoid cancellation.
  return {a.K / big, big};
}

double hierarchy_bound(const ModelSpec& model, const ReducedState& r, double kappa) {
  if (is_quadratic(model)) return kappa * (r.dp2 + r.dq2 + std::abs(r.dqp));
  return kappa * r.dp2;
}

SolvedSector solve_pt_sector(const ModelSpec& model, const ReducedState& r, Branch sign, const AlgebraContext& ctx,
                             const SolveOptions& opts) {
  const DptRoots roots = dpt2_roots(model, r);
  const double bound = hierarchy_bound(model, r, opts.kappa);
  const double slack = 1e-12 * std::max(1.0, bound);
  if (roots.minus > bound + slack) {
    throw NoSemiclassicalRoot(
        fmt::format("(Δp_t)² roots {} and {} both exceed κ-bound {}", roots.minus, roots.plus, bound));
  }
  return solve_unchecked(model, r, sign, ctx);
}

MomentState lift(const ReducedState& r, const SolvedSector& sector, const AlgebraContext& ctx) {
  MomentState s(ctx);
  s[Var::t] = r.t;
  s[Var::pt] = sector.pt;
  s[Var::q] = r.q;
  s[Var::p] = r.p;
  s[Var::Dtpt] = sector.dtpt;
  s[Var::Dpt2] = sector.dpt2;
  s[Var::Dq2] = r.dq2;
  s[Var::Dqp] = r.dqp;
  s[Var::Dp2] = r.dp2;
  s[Var::Dptp] = sector.dptp;
  s[Var::Dptq] = sector.dptq;
  return s;
}

std::array<Complex, 4> solve_quartic_pt(const LinearTimePotential& model, const ReducedState& r,
                                        const AlgebraContext& ctx, const PreGaugeMoments& gauge) {
  const double lam = model.lambda;
  const double hbar = ctx.hbar();
  // x⁴ + a2 x² + a1 x + a0
  const Complex a2 = -(r.p * r.p + model.m * model.m - lam * r.t + r.dp2);
  const Complex a1 = 0.5 * kI * hbar * lam;
  const Complex a0 = r.p * r.p * r.dp2 + 0.25 * lam * lam * gauge.dt2 - lam * r.p * gauge.dtp;

  Eigen::Matrix4cd companion = Eigen::Matrix4cd::Zero();
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(3, 2) = 1.0;
  companion(0, 3) = -a0;
  companion(1, 3) = -a1;
  companion(2, 3) = -a2;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw DomainError("quartic eigenvalue solver failed");

  std::array<Complex, 4> roots;
  for (int k = 0; k < 4; ++k) {
    Complex x = solver.eigenvalues()[k];
    for (int it = 0; it < 3; ++it) {
      const Complex x2 = x * x;
      const Complex f = x2 * x2 + a2 * x2 + a1 * x + a0;
      const Complex df = 4.0 * x2 * x + 2.0 * a2 * x + a1;
      if (std::abs(df) == 0.0) break;
      x -= f / df;
    }
    roots[static_cast<std::size_t>(k)] = x;
  }
  return roots;
}

DiracMatrix dirac_matrix(const ModelSpec& model, const ReducedState& r, Branch sign, const AlgebraContext& ctx) {
  const MomentState state = lift(r, solve_unchecked(model, r, sign, ctx), ctx);
  const auto x = seed(state);
  const Jet E = energy_jet(model, x);
  const double s = sigma(sign);
  const Complex half_ih = 0.5 * kI * ctx.hbar();
  auto at = [&](Var v) -> const Jet& { return x[index(v)]; };

  const Jet& p = at(Var::p);
  const Jet& P = at(Var::Dp2);
  const Jet& X = at(Var::Dqp);
  Jet S = p * p + P;
  Jet f3 = p * P;                  // numerator of the Δ(p_t p) solution
  Jet f4 = p * (X + Jet(half_ih));  // numerator of the Δ(p_t q) solution
  if (is_quadratic(model)) {
    const Jet& q = at(Var::q);
    const Jet& Q = at(Var::Dq2);
    S += q * q + Q + Jet(effective_mass_squared(model));
    f3 += q * X - Jet(half_ih) * q;
    f4 += q * Q;
  } else if (!is_massless(model)) {
    const Jet& t = at(Var::t);
    Jet V(time_potential(model, t.v.real()));
    V.d = t.d;
    for (auto& g : V.d) g *= time_potential_derivative(model, t.v.real());
    S += Jet(effective_mass_squared(model)) - V;
  }

  const std::array<Jet, 6> chi = {
      at(Var::Dpt2) - S + E * E,
      at(Var::Dptp) - s * f3 / E,
      at(Var::Dptq) - s * f4 / E,
      at(Var::Dt2),
      at(Var::Dtq),
      at(Var::Dtp),
  };
  const StructureMatrix omega = structure_matrix(state);
  DiracMatrix m;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      m(i, j) = bracket_from_gradients(chi[static_cast<std::size_t>(i)].d, chi[static_cast<std::size_t>(j)].d, omega);
    }
  }
  return m;
}

double dirac_determinant(const ReducedState& r, const AlgebraContext& ctx) {
  const double h2 = ctx.hbar() * ctx.hbar();
  const double pq = r.dp2 * r.dq2;
  const double x2 = r.dqp * r.dqp;
  return -4.0 * h2 * (h2 * h2 / 16.0 + x2 * x2 + 2.0 * (pq - h2 / 4.0) * (pq - x2));
}

double dirac_determinant_factored(const ReducedState& r, const AlgebraContext& ctx) {
  const double h2 = ctx.hbar() * ctx.hbar();
  const double inner = h2 / 4.0 + r.dqp * r.dqp - r.dq2 * r.dp2;
  return -4.0 * h2 * inner * inner;
}

std::string Admissibility::message() const {
  switch (violation) {
    case Violation::none: return "admissible";
    case Violation::reality: return "non-finite physical variable";
    case Violation::positivity_q: return "(Δq)² < 0";
    case Violation::positivity_p: return "(Δp)² < 0";
    case Violation::uncertainty: return "(Δq)²(Δp)² − Δ(qp)² < ħ²/4";
  }
  return "unknown";
}

Admissibility check_admissible(const ReducedState& r, const AlgebraContext& ctx, double tolerance) {
  for (double v : {r.t, r.q, r.p, r.dq2, r.dqp, r.dp2}) {
    if (!std::isfinite(v)) return {Violation::reality};
  }
  if (r.dq2 < -tolerance) return {Violation::positivity_q};
  if (r.dp2 < -tolerance) return {Violation::positivity_p};
  const double floor = 0.25 * ctx.hbar() * ctx.hbar();
  if (r.dq2 * r.dp2 - r.dqp * r.dqp < floor * (1.0 - tolerance)) return {Violation::uncertainty};
  return {};
}

}  // namespace effcon

#include "effcon/verify.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "effcon/dynamics.hpp"
#include "effcon/errors.hpp"
#include "effcon/models.hpp"
#include "effcon/moment_algebra.hpp"
#include "effcon/oracle.hpp"
#include "effcon/quadrature.hpp"
#include "effcon/reduction.hpp"

namespace effcon {

namespace {

CriterionResult result(std::string id, double value, double bound, bool pass, std::string detail) {
  return {std::move(id), value, bound, pass, std::move(detail)};
}

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
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

int canonical(Var a, Var b) {
  if ((a == Var::t && b == Var::pt) || (a == Var::q && b == Var::p)) return 1;
  if ((a == Var::pt && b == Var::t) || (a == Var::p && b == Var::q)) return -1;
  return 0;
}

// {G^{ab}, G^{cd}} from the canonical brackets of the factors.
PolyExpr weyl_bracket(Var A, Var B) {
  const auto [a, b] = moment_factors(A);
  const auto [c, d] = moment_factors(B);
  PolyExpr out;
  out += canonical(a, c) * PolyExpr(moment_of(b, d));
  out += canonical(a, d) * PolyExpr(moment_of(b, c));
  out += canonical(b, c) * PolyExpr(moment_of(a, d));
  out += canonical(b, d) * PolyExpr(moment_of(a, c));
  return out;
}

std::vector<CriterionResult> brackets_suite() {
  int bad = 0;
  int checked = 0;
  for (Var a : kAllVars) {
    for (Var b : kAllVars) {
      if (is_moment(a) || is_moment(b)) continue;
      ++checked;
      if (!(base_bracket(a, b) == PolyExpr(canonical(a, b)))) ++bad;
    }
  }
  for (Var a : kAllVars) {
    for (Var m : kMoments) {
      if (is_moment(a)) continue;
      checked += 2;
      if (!base_bracket(a, m).is_zero()) ++bad;
      if (!base_bracket(m, a).is_zero()) ++bad;
    }
  }
  for (Var a : kMoments) {
    for (Var b : kMoments) {
      ++checked;
      if (!(base_bracket(a, b) == weyl_bracket(a, b))) ++bad;
    }
  }
  return {result("1", bad, 0, bad == 0, fmt::format("{} base brackets checked, {} mismatches", checked, bad))};
}

std::mt19937_64& rng() {
  thread_local std::mt19937_64 gen(20240501ULL);
  return gen;
}

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

std::vector<CriterionResult> closure_suite() {
  std::vector<CriterionResult> out;
  auto count_nonzero = [](const ClosureReport& r) {
    int n = 0;
    for (const auto& e : r.entries) n += e.residual.is_zero() ? 0 : 1;
    return n;
  };

  // 2: free models close exactly.
  try {
    const ClosureReport free = closure_report(build_constraints(FreeMassive{1.3}));
    const ClosureReport massless = closure_report(build_constraints(Massless{}));
    const int n = count_nonzero(free) + count_nonzero(massless);
    out.push_back(result("2", n, 0, n == 0 && free.verdict == ClosureExpectation::exact,
                         fmt::format("{} + {} ordered brackets, nonzero residuals: {}", free.entries.size(),
                                     massless.entries.size(), n)));
  } catch (const MalformedTable& e) {
    out.push_back(result("2", 1, 0, false, e.what()));
  }

  // 3: quadratic potential closes with the tabulated order-ħ² residuals.
  try {
    const ClosureReport quad = closure_report(build_constraints(QuadraticPotential{0.7}));
    int mismatched = 0;
    unsigned min_grade = 99;
    for (const auto& e : quad.entries) {
      if (!e.matches_expected) ++mismatched;
      if (!e.residual.is_zero()) min_grade = std::min(min_grade, e.min_grade);
    }
    out.push_back(result("3", mismatched, 0,
                         mismatched == 0 && min_grade >= 2 && quad.verdict == ClosureExpectation::order_hbar,
                         fmt::format("residual mismatches {}, lowest residual grade {}", mismatched, min_grade)));
  } catch (const MalformedTable& e) {
    out.push_back(result("3", 1, 0, false, e.what()));
  }

  // 12: boost covariance on random states.
  const ConstraintSet cs = build_constraints(FreeMassive{1.1});
  double worst_c = 0.0;
  double worst_vec = 0.0;
  for (int k = 0; k < 100; ++k) {
    MomentState s(AlgebraContext(uniform(0.1, 1.0)));
    for (Var v : kAllVars) s[v] = Complex{uniform(-2.0, 2.0), is_moment(v) ? uniform(-0.5, 0.5) : 0.0};
    const double v = uniform(-0.95, 0.95);
    const MomentState b = boost(s, v);
    const Complex c0 = evaluate(cs.C, s), c1 = evaluate(cs.C, b);
    worst_c = std::max(worst_c, std::abs(c1 - c0) / std::max(1.0, std::abs(c0)));
    const double g = 1.0 / std::sqrt(1.0 - v * v);
    const Complex pt0 = evaluate(cs.C_pt, s), p0 = evaluate(cs.C_p, s);
    const Complex want_pt = g * (pt0 - v * p0), want_p = g * (p0 - v * pt0);
    const Complex got_pt = evaluate(cs.C_pt, b), got_p = evaluate(cs.C_p, b);
    const double scale = std::max({1.0, std::abs(want_pt), std::abs(want_p)});
    worst_vec = std::max(worst_vec, std::max(std::abs(got_pt - want_pt), std::abs(got_p - want_p)) / scale);
  }
  const double worst = std::max(worst_c, worst_vec);
  out.push_back(result("12", worst, 1e-12, worst <= 1e-12,
                       fmt::format("C invariance {:.3g}, (C_pt, C_p) covariance {:.3g}", worst_c, worst_vec)));
  return out;
}

ReducedState random_admissible(double hbar) {
  ReducedState r;
  r.q = uniform(-3.0, 3.0);
  r.p = uniform(-3.0, 3.0);
  r.dq2 = hbar * uniform(0.1, 3.0);
  r.dqp = hbar * uniform(-1.0, 1.0);
  r.dp2 = (0.25 * hbar * hbar + r.dqp * r.dqp) / r.dq2 * (1.0 + uniform(0.01, 2.0));
  return r;
}

std::vector<CriterionResult> dirac_suite() {
  const ModelSpec model = FreeMassive{1.0};
  double worst_closed = 0.0;
  double worst_branch = 0.0;
  double max_det = -INFINITY;
  for (int k = 0; k < 1000; ++k) {
    const AlgebraContext ctx(uniform(0.2, 1.0));
    const ReducedState r = random_admissible(ctx.hbar());
    const Complex dp = dirac_matrix(model, r, Branch::plus, ctx).determinant();
    const Complex dm = dirac_matrix(model, r, Branch::minus, ctx).determinant();
    const double closed = dirac_determinant(r, ctx);
    worst_closed = std::max(worst_closed, std::abs(dp - closed) / std::abs(closed));
    worst_branch = std::max(worst_branch, std::abs(dp - dm) / std::abs(dp));
    max_det = std::max({max_det, dp.real(), dm.real()});
  }
  return {
      result("7a", worst_closed, 1e-10, worst_closed <= 1e-10,
             "numeric det vs printed closed form, 1000 admissible states"),
      result("7b", worst_branch, 1e-10, worst_branch <= 1e-10, "det(+) vs det(-)"),
      result("7c", max_det, 0.0, max_det < 0.0, "largest determinant seen"),
  };
}

std::vector<CriterionResult> limits_suite() {
  std::vector<CriterionResult> out;

  {
    ReducedState r;
    r.p = 3.0;
    const double E = energy(FreeMassive{4.0}, r);
    const double err = std::abs(E - 5.0) / 5.0;
    out.push_back(result("4", err, 1e-12, err <= 1e-12, fmt::format("E = {:.17g}", E)));
  }

  {
    const double m = 1.0, hbar = 1.0;
    std::vector<double> d, y;
    for (double delta : {1e-1, 1e-2, 1e-3, 1e-4}) {
      // p²/m² counts as order δ, so (Δp)²/m² is order ħδ.
      ReducedState r;
      r.p = std::sqrt(delta) * m;
      r.dp2 = hbar * delta * m * m;
      d.push_back(delta);
      y.push_back(std::abs(energy(FreeMassive{m}, r) - energy_nonrelativistic(m, r)) / m);
    }
    const double s = loglog_slope(d, y);
    out.push_back(result("5", s, 0.05, std::abs(s - 2.0) <= 0.05, "slope of |E - E_nonrel|/m vs delta, target 2"));
  }

  {
    std::vector<double> h, yq, yf, yg;
    for (double hbar : {1e-1, 1e-2, 1e-3, 1e-4}) {
      ReducedState rq{0.0, 1.2, 0.7, 0.6 * hbar, 0.1 * hbar, 0.5 * hbar};
      ReducedState rf{0.0, 0.0, 0.8, 0.6 * hbar, 0.0, 0.5 * hbar};
      h.push_back(hbar);
      yq.push_back(std::abs(energy(QuadraticPotential{0.5}, rq) - energy_expanded(QuadraticPotential{0.5}, rq)));
      yf.push_back(std::abs(energy(FreeMassive{1.0}, rf) - energy_expanded(FreeMassive{1.0}, rf)));
      yg.push_back(std::abs(sqrt_mass_shell_expectation(rf.p, rf.dp2, 1.0) - energy_expanded(FreeMassive{1.0}, rf)));
    }
    const double sq = loglog_slope(h, yq), sf = loglog_slope(h, yf), sg = loglog_slope(h, yg);
    const double worst = std::max(std::abs(sq - 2.0), std::abs(sf - 2.0));
    out.push_back(result("6a", worst, 0.1, worst <= 0.1,
                         fmt::format("|E - E_exp| slopes: quadratic {:.4f}, free {:.4f}", sq, sf)));
    out.push_back(result("6b", sg, 1.5, sg >= 1.5, "slope of |<sqrt(p^2+m^2)> - E_exp| vs hbar"));
  }

  {
    int bad = 0;
    const AlgebraContext ctx(0.7);
    const ModelSpec model = Massless{};
    const ConstraintSet cs = build_constraints(model);
    for (double p : {2.5, -2.5, 0.3, -7.0}) {
      const ReducedState r{0.4, 1.1, p, 0.7, 0.1, 0.4};
      for (Branch b : {Branch::plus, Branch::minus}) {
        const SolvedSector s = solve_pt_sector(model, r, b, ctx);
        if (s.pt * s.pt - p * p != 0.0) ++bad;
        if (s.dpt2 != r.dp2) ++bad;
        if (evaluate(cs.C, lift(r, s, ctx)) != Complex{}) ++bad;
        for (const StateDerivative& d : {effective_rhs(model, r, b), effective_rhs_generic(model, r, ctx, b)}) {
          if (d.dq2 != 0.0 || d.dqp != 0.0 || d.dp2 != 0.0 || d.p != 0.0) ++bad;
        }
      }
    }
    out.push_back(result("8", bad, 0, bad == 0, "exact massless identities violated"));
  }

  {
    const AlgebraContext ctx(1e-2);
    const ReducedState r{1.0, 0.0, 1.0, 0.0, 0.0, 0.5 * ctx.hbar()};
    std::vector<double> lam, dist;
    for (double l : {1e-2, 1e-3, 1e-4, 1e-5}) {
      const LinearTimePotential model{1.0, l};
      const double target = -energy(model, r);
      double best = INFINITY;
      for (const Complex& z : solve_quartic_pt(model, r, ctx)) best = std::min(best, std::abs(z - target));
      lam.push_back(l);
      dist.push_back(best);
    }
    const double s = loglog_slope(lam, dist);
    out.push_back(result("11", s, 0.1, std::abs(s - 1.0) <= 0.1,
                         fmt::format("slope in lambda, target 1; distance/(lambda*hbar) at 1e-2: {:.4f}",
                                     dist[0] / (lam[0] * ctx.hbar()))));
  }
  return out;
}

std::vector<CriterionResult> appb_suite() {
  std::vector<CriterionResult> out;
  const double hbar = 1.0, q0 = 10.0;
  const AlgebraContext ctx(hbar);
  const QuadraticPotential quad{0.0};
  const ModelSpec model = quad;
  const ReducedState r0{0.0, q0, 0.0, 0.5 * hbar, 0.0, 0.5 * hbar};

  // 9: conservation over [0, 5q₀] with the default integrator.
  IntegratorOptions opts;
  const Trajectory traj = integrate(model, r0, {0.0, 5.0 * q0}, ctx, opts);
  const double E0 = traj.samples.front().E;
  const double C0 = r0.dq2 * r0.dp2 - r0.dqp * r0.dqp;
  double dE = 0.0, dC = 0.0;
  for (const Sample& s : traj.samples) {
    dE = std::max(dE, std::abs(s.E - E0) / E0);
    dC = std::max(dC, std::abs(s.state.dq2 * s.state.dp2 - s.state.dqp * s.state.dqp - C0) / C0);
  }
  out.push_back(result("9a", dE, 1e-8, dE < 1e-8, "relative drift of E"));
  out.push_back(result("9b", dC, 1e-8, dC < 1e-8, "relative drift of (dq)^2(dp)^2 - d(qp)^2"));

  // 10: effective vs oracle on [0, 2q₀].
  const FockVector psi0 = FockVector::coherent(q0 / std::sqrt(2.0 * hbar), hbar, 0.0);
  double dev_qp = 0.0, dev_dp = 0.0;
  const double t_end = 2.0 * q0;
  for (const Sample& s : traj.samples) {
    if (s.time > t_end + 1e-9) break;
    const ReducedState o = observables(psi0.evolve(s.time));
    dev_qp = std::max(dev_qp, std::hypot(s.state.q - o.q, s.state.p - o.p) / q0);
    dev_dp = std::max(dev_dp, std::abs(std::sqrt(s.state.dp2) - std::sqrt(o.dp2)) / std::sqrt(o.dp2));
  }
  out.push_back(result("10a", dev_qp, 0.03, dev_qp < 0.03, "max |(q,p)_eff - (q,p)_oracle| / q0 on [0, 2q0]"));
  out.push_back(result("10b", dev_dp, 0.10, dev_dp < 0.10, "max relative dp deviation on [0, 2q0]"));

  const double ratio = std::sqrt(observables(psi0.evolve(t_end)).dp2 / observables(psi0).dp2);
  const double ratio_err = std::abs(ratio - kPinnedDpRatio) / kPinnedDpRatio;
  out.push_back(result("10c", ratio_err, 1e-8, ratio_err <= 1e-8 && ratio > 1.0,
                       fmt::format("oracle dp(2q0)/dp(0) = {:.17g}, pinned {:.17g}", ratio, kPinnedDpRatio)));

  std::vector<double> times;
  for (int k = 0; k <= 5000; ++k) times.push_back(0.01 * k);
  double radius_err = 0.0;
  for (const auto& [q, p] : classical_trajectory(quad, 0.0, q0, times)) {
    radius_err = std::max(radius_err, std::abs(std::hypot(q, p) - q0) / q0);
  }
  out.push_back(result("10d", radius_err, 1e-10, radius_err <= 1e-10, "classical orbit radius vs q0"));

  // 13: oracle internals.
  {
    FockVector f = psi0;
    const double n0 = f.norm();
    for (int k = 0; k < 1000000; ++k) f = f.evolve(5e-5);
    const double drift = std::abs(f.norm() - n0);
    out.push_back(result("13a", drift, 1e-13, drift < 1e-13, "norm drift after 1e6 evolve steps"));
  }
  {
    const FockVector big = FockVector::coherent(q0 / std::sqrt(2.0 * hbar), hbar, 0.0, 2 * psi0.levels());
    double worst_cut = 0.0, worst_dense = 0.0;
    for (double t : {0.0, 5.0, 10.0, 20.0, 35.0, 50.0}) {
      const ReducedState a = observables(psi0.evolve(t));
      const ReducedState b = observables(big.evolve(t));
      const ReducedState c = observables_dense(psi0.evolve(t));
      const double fa[] = {a.q, a.p, a.dq2, a.dqp, a.dp2};
      const double fb[] = {b.q, b.p, b.dq2, b.dqp, b.dp2};
      const double fc[] = {c.q, c.p, c.dq2, c.dqp, c.dp2};
      for (int i = 0; i < 5; ++i) {
        const double scale = std::max(std::abs(fa[i]), 0.5 * hbar);
        worst_cut = std::max(worst_cut, std::abs(fa[i] - fb[i]) / scale);
        worst_dense = std::max(worst_dense, std::abs(fa[i] - fc[i]) / scale);
      }
    }
    out.push_back(result("13b", worst_cut, 1e-10, worst_cut < 1e-10,
                         fmt::format("cutoff {} vs {} levels", psi0.levels(), big.levels())));
    out.push_back(result("13c", worst_dense, 1e-12, worst_dense <= 1e-12, "ladder sums vs dense matrices"));
  }
  return out;
}

}  // namespace

std::optional<Suite> parse_suite(std::string_view name) {
  for (Suite s : kAllSuites) {
    if (suite_name(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view suite_name(Suite s) {
  switch (s) {
    case Suite::brackets: return "brackets";
    case Suite::closure: return "closure";
    case Suite::dirac: return "dirac";
    case Suite::limits: return "limits";
    case Suite::appB: return "appB";
  }
  return "?";
}

std::vector<CriterionResult> run_suite(Suite suite) {
  switch (suite) {
    case Suite::brackets: return brackets_suite();
    case Suite::closure: return closure_suite();
    case Suite::dirac: return dirac_suite();
    case Suite::limits: return limits_suite();
    case Suite::appB: return appb_suite();
  }
  return {};
}

std::string format_result(const CriterionResult& r) {
  return fmt::format("{}\t{:.6g}\t{:.6g}\t{}\t{}", r.id, r.value, r.bound, r.pass ? "PASS" : "FAIL", r.detail);
}

}  // namespace effcon

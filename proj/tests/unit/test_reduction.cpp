#include <doctest.h>

#include <algorithm>
#include <random>

#include "effcon/errors.hpp"
#include "effcon/reduction.hpp"
#include "support.hpp"

using namespace effcon;
using effcon::testing::loglog_slope;
using effcon::testing::random_state;
using effcon::testing::relative;

TEST_CASE("energy closed forms") {
  CHECK(relative(energy(FreeMassive{4.0}, {0.0, 0.0, 3.0, 0.0, 0.0, 0.0}), 5.0) < 1e-15);
  CHECK(energy(Massless{}, {0.0, 1.0, -2.0, 0.3, 0.1, 0.7}) == 2.0);
  // q0 = 10 minimal packet; reference from a 40-digit evaluation of the radical.
  const ReducedState packet{0.0, 10.0, 0.0, 0.5, 0.0, 0.5};
  CHECK(relative(energy(QuadraticPotential{0.0}, packet), 10.025093512656285) < 1e-14);
  // Oracle ⟨H⟩ = Σ Poisson(50)_n √(2n+1) agrees to O(ħ²).
  CHECK(std::abs(energy(QuadraticPotential{0.0}, packet) - 10.025031484572115) < 1e-4);
}

TEST_CASE("energy is non-negative on physical states") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 500; ++k) {
    const ReducedState r = random_state(rng, 0.3);
    CHECK(energy(FreeMassive{0.7}, r) >= 0.0);
    CHECK(energy(QuadraticPotential{0.7}, r) >= 0.0);
  }
}

TEST_CASE("energy domain errors") {
  CHECK_THROWS_AS(energy(Massless{}, {0.0, 1.0, 0.0, 0.5, 0.0, 0.5}), DomainError);
  // p² + m² − λt < 0 once t is large.
  CHECK_THROWS_AS(energy(LinearTimePotential{1.0, 1.0}, {5.0, 0.0, 0.1, 0.5, 0.0, 0.5}), DomainError);
}

TEST_CASE("expanded energy") {
  const ReducedState r0{0.0, 0.0, 0.8, 0.0, 0.0, 0.0};
  CHECK(energy_expanded(FreeMassive{0.6}, r0) == energy(FreeMassive{0.6}, r0));
  CHECK(relative(energy_expanded(FreeMassive{0.6}, r0), 1.0) < 1e-15);

  const double p = 0.8, m = 0.6, Q = 0.03, P = 0.02;
  const ReducedState r{0.0, 0.0, p, Q, 0.0, P};
  const double h2 = p * p + m * m;
  const double want = std::sqrt(h2) * (1.0 + (m * m * P + h2 * Q) / (2.0 * h2 * h2));
  CHECK(relative(energy_expanded(QuadraticPotential{m}, r), want) < 1e-14);

  CHECK(energy_nonrelativistic(2.0, {0.0, 0.0, 1.0, 0.0, 0.0, 0.5}) == doctest::Approx(2.0 + 1.5 / 4.0));
}

TEST_CASE("expansion error scales as ħ²") {
  std::vector<double> h, e;
  for (double hbar : {1e-1, 1e-2, 1e-3}) {
    const ReducedState r{0.0, 1.2, 0.7, 0.6 * hbar, 0.1 * hbar, 0.5 * hbar};
    h.push_back(hbar);
    e.push_back(std::abs(energy(QuadraticPotential{0.5}, r) - energy_expanded(QuadraticPotential{0.5}, r)));
  }
  CHECK(std::abs(loglog_slope(h, e) - 2.0) < 0.1);
}

TEST_CASE("dpt2 roots") {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 200; ++k) {
    const ReducedState r = random_state(rng, 0.01);
    for (ModelSpec model : {ModelSpec{FreeMassive{1.0}}, ModelSpec{QuadraticPotential{1.0}}}) {
      const DptRoots roots = dpt2_roots(model, r);
      const double scale = model.index() == 0 ? r.p * r.p + 1.0 : r.p * r.p + r.q * r.q + 1.0;
      CHECK(roots.minus <= hierarchy_bound(model, r, 10.0));
      CHECK(roots.plus > hierarchy_bound(model, r, 10.0));
      CHECK(std::abs(roots.plus - scale) < 0.1);
    }
  }
}

TEST_CASE("solved sector") {
  const AlgebraContext ctx(0.1);
  const ReducedState r{0.0, 0.4, 1.1, 0.07, 0.01, 0.06};

  SUBCASE("massless") {
    const SolvedSector s = solve_pt_sector(Massless{}, r, Branch::plus, ctx);
    CHECK(s.dpt2 == r.dp2);
    CHECK(s.pt * s.pt - r.p * r.p == 0.0);
    CHECK(s.pt == -std::abs(r.p));
  }
  SUBCASE("free massive") {
    for (Branch b : {Branch::plus, Branch::minus}) {
      const SolvedSector s = solve_pt_sector(FreeMassive{1.0}, r, b, ctx);
      CHECK(s.pt == doctest::Approx(sigma(b) * energy(FreeMassive{1.0}, r)));
      CHECK(s.dtpt.real() == doctest::Approx(0.0));
      CHECK(s.dtpt.imag() == doctest::Approx(-0.05));
    }
  }
  SUBCASE("quadratic") {
    for (Branch b : {Branch::plus, Branch::minus}) {
      const SolvedSector s = solve_pt_sector(QuadraticPotential{1.0}, r, b, ctx);
      const double E = energy(QuadraticPotential{1.0}, r);
      const Complex want = sigma(b) * (r.p * r.dp2 + r.q * r.dqp - Complex(0.0, 0.5 * ctx.hbar() * r.q)) / E;
      CHECK(std::abs(s.dptp - want) < 1e-14);
      CHECK(s.dtpt.imag() == doctest::Approx(-0.05));
    }
  }
  SUBCASE("uncertainty in (t, p_t) is saturated") {
    const SolvedSector s = solve_pt_sector(FreeMassive{1.0}, r, Branch::plus, ctx);
    const MomentState full = lift(r, s, ctx);
    const Complex u = full[Var::Dt2] * full[Var::Dpt2] - full[Var::Dtpt] * full[Var::Dtpt];
    CHECK(std::abs(u - 0.25 * ctx.hbar() * ctx.hbar()) < 1e-15);
  }
  SUBCASE("no semiclassical root") {
    // The small root is p²(Δp)²/E²-ish, above κ(Δp)² for κ < p²/E².
    CHECK_THROWS_AS(solve_pt_sector(FreeMassive{0.1}, r, Branch::plus, ctx, SolveOptions{0.5}), NoSemiclassicalRoot);
  }
}

TEST_CASE("constraints vanish on the solved branch") {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 200; ++k) {
    const double hbar = 0.05;
    const AlgebraContext ctx(hbar);
    const ReducedState r = random_state(rng, hbar);
    for (Branch b : {Branch::plus, Branch::minus}) {
      const MomentState s = lift(r, solve_pt_sector(FreeMassive{1.0}, r, b, ctx), ctx);
      for (const PolyExpr& c : build_constraints(FreeMassive{1.0}).all()) CHECK(std::abs(evaluate(c, s)) < 1e-12);
    }
  }
}

TEST_CASE("quadratic constraints vanish on the solved branch") {
  for (double hbar : {1e-2, 1e-3, 1e-4}) {
    const AlgebraContext ctx(hbar);
    const ReducedState r{0.0, 0.8, -0.6, 0.7 * hbar, 0.2 * hbar, 0.9 * hbar};
    const MomentState s = lift(r, solve_pt_sector(QuadraticPotential{1.0}, r, Branch::plus, ctx), ctx);
    for (const PolyExpr& c : build_constraints(QuadraticPotential{1.0}).all()) CHECK(std::abs(evaluate(c, s)) < 1e-12);
  }
}

TEST_CASE("quartic for the linear time potential") {
  const AlgebraContext ctx(0.2);
  const ReducedState r{0.5, 0.0, 0.9, 0.3, 0.05, 0.25};

  SUBCASE("λ = 0 reduces to the free quadratic in p_t²") {
    const auto roots = solve_quartic_pt(LinearTimePotential{1.0, 0.0}, r, ctx);
    const DptRoots free = dpt2_roots(FreeMassive{1.0}, r);
    const double big = r.p * r.p + 1.0 + r.dp2 - free.minus;  // E²
    std::vector<double> got, want = {-std::sqrt(big), -std::sqrt(free.minus), std::sqrt(free.minus), std::sqrt(big)};
    for (const Complex& z : roots) {
      CHECK(std::abs(z.imag()) < 1e-12);
      got.push_back(z.real());
    }
    std::sort(got.begin(), got.end());
    for (std::size_t i = 0; i < 4; ++i) CHECK(relative(got[i], want[i]) < 1e-12);
  }
  SUBCASE("Vieta") {
    const LinearTimePotential model{1.0, 0.05};
    const PreGaugeMoments g{0.1, 0.02, -0.03};
    const auto z = solve_quartic_pt(model, r, ctx, g);
    const Complex sum = z[0] + z[1] + z[2] + z[3];
    Complex pairs{}, triples{}, prod = z[0] * z[1] * z[2] * z[3];
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        pairs += z[i] * z[j];
        for (int k = j + 1; k < 4; ++k) triples += z[i] * z[j] * z[k];
      }
    }
    const double lam = model.lambda, p = r.p, P = r.dp2;
    CHECK(std::abs(sum) < 1e-12);
    CHECK(std::abs(pairs + (p * p + 1.0 - lam * r.t + P)) < 1e-12);
    CHECK(std::abs(-triples - Complex(0.0, 0.5 * ctx.hbar() * lam)) < 1e-12);
    CHECK(std::abs(prod - (p * p * P + 0.25 * lam * lam * g.dt2 - lam * p * g.dtp)) < 1e-12);
  }
}

TEST_CASE("dirac matrix") {
  const AlgebraContext ctx(0.3);
  const ReducedState r{0.0, 0.2, 0.9, 0.4, 0.05, 0.3};
  for (Branch b : {Branch::plus, Branch::minus}) {
    const DiracMatrix d = dirac_matrix(FreeMassive{1.0}, r, b, ctx);
    CHECK(std::abs(d(0, 3) - Complex(0.0, 2.0 * ctx.hbar())) < 1e-14);
    CHECK(std::abs(d(1, 4) - Complex(-r.dqp, 0.5 * ctx.hbar())) < 1e-14);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        CHECK(std::abs(d(i, j) + d(j, i)) < 1e-14);
        if ((i < 3) == (j < 3)) CHECK(std::abs(d(i, j)) < 1e-14);
      }
    }
    const Complex det = d.determinant();
    CHECK(std::abs(det.imag()) < 1e-14);
    CHECK(relative(det.real(), dirac_determinant_factored(r, ctx)) < 1e-10);
  }
}

TEST_CASE("dirac determinant closed forms") {
  const double h = 0.4;
  const AlgebraContext ctx(h);
  CHECK(relative(dirac_determinant({0.0, 0.0, 1.0, h / 2, 0.0, h / 2}, ctx), -std::pow(h, 6) / 4.0) < 1e-14);
  // Saturated but correlated: dq2·dp2 − dqp² = ħ²/4.
  const double X = 0.1, Q = 0.3, P = (h * h / 4 + X * X) / Q;
  CHECK(relative(dirac_determinant({0.0, 0.0, 1.0, Q, X, P}, ctx),
                 -4.0 * h * h * std::pow(h * h / 4.0 + X * X, 2)) < 1e-13);
  CHECK(dirac_determinant_factored({0.0, 0.0, 1.0, Q, X, P}, ctx) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("admissibility") {
  const double h = 0.2;
  const AlgebraContext ctx(h);
  CHECK(check_admissible({0.0, 0.0, 0.0, h / 2, 0.0, h / 2}, ctx).ok());
  CHECK(check_admissible({0.0, 0.0, 0.0, h / 2, h / 10, h / 2}, ctx).violation == Violation::uncertainty);
  CHECK(check_admissible({0.0, 0.0, 0.0, h / 2, 0.0, -1.0}, ctx).violation == Violation::positivity_p);
  CHECK(check_admissible({0.0, 0.0, 0.0, -1.0, 0.0, h / 2}, ctx).violation == Violation::positivity_q);
  CHECK(check_admissible({0.0, std::nan(""), 0.0, h / 2, 0.0, h / 2}, ctx).violation == Violation::reality);
  CHECK_FALSE(check_admissible({0.0, 0.0, 0.0, h / 2, h / 10, h / 2}, ctx).message().empty());
}

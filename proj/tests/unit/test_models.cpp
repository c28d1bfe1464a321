#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "effcon/errors.hpp"
#include "effcon/models.hpp"
#include "support.hpp"

using namespace effcon;
using effcon::testing::relative;

namespace {

PolyExpr v(Var x) { return PolyExpr(x); }
const PolyExpr ih = PolyExpr::i() * PolyExpr::hbar();
const PolyExpr t = v(Var::t), pt = v(Var::pt), q = v(Var::q), p = v(Var::p);

// The five conditions as printed, typed out independently of the library.
std::array<PolyExpr, 5> printed_free(double m2) {
  return {
      pt * pt - p * p - PolyExpr(m2) + v(Var::Dpt2) - v(Var::Dp2),
      2 * pt * v(Var::Dtpt) + ih * pt - 2 * p * v(Var::Dtp),
      2 * pt * v(Var::Dpt2) - 2 * p * v(Var::Dptp),
      2 * pt * v(Var::Dptq) - 2 * p * v(Var::Dqp) - ih * p,
      2 * pt * v(Var::Dptp) - 2 * p * v(Var::Dp2),
  };
}

std::array<PolyExpr, 5> printed_quadratic(double m2) {
  return {
      pt * pt - p * p - q * q - PolyExpr(m2) + v(Var::Dpt2) - v(Var::Dp2) - v(Var::Dq2),
      2 * pt * v(Var::Dtpt) + ih * pt - 2 * p * v(Var::Dtp) - 2 * q * v(Var::Dtq),
      2 * pt * v(Var::Dpt2) - 2 * p * v(Var::Dptp) - 2 * q * v(Var::Dptq),
      2 * pt * v(Var::Dptq) - 2 * p * v(Var::Dqp) - ih * p - 2 * q * v(Var::Dq2),
      2 * pt * v(Var::Dptp) - 2 * p * v(Var::Dp2) - 2 * q * v(Var::Dqp) + ih * q,
  };
}

MomentState random_moment_state(std::mt19937_64& rng, double hbar) {
  std::normal_distribution<double> n;
  MomentState s(AlgebraContext{hbar});
  for (Var x : kAllVars) s[x] = n(rng);
  return s;
}

}  // namespace

TEST_CASE("free constraints match the printed conditions") {
  const ConstraintSet cs = build_constraints(FreeMassive{1.5});
  const auto expected = printed_free(2.25);
  const auto got = cs.all();
  for (std::size_t i = 0; i < 5; ++i) {
    INFO(constraint_name(i));
    CHECK(got[i] == expected[i]);
  }
  CHECK(cs.closure_expectation == ClosureExpectation::exact);
}

TEST_CASE("massless constraints drop m² from C only") {
  const ConstraintSet cs = build_constraints(Massless{});
  const auto expected = printed_free(0.0);
  const auto got = cs.all();
  for (std::size_t i = 0; i < 5; ++i) CHECK(got[i] == expected[i]);
}

TEST_CASE("quadratic potential constraints") {
  const ConstraintSet cs = build_constraints(QuadraticPotential{0.5});
  const auto expected = printed_quadratic(0.25);
  const auto got = cs.all();
  for (std::size_t i = 0; i < 5; ++i) {
    INFO(constraint_name(i));
    CHECK(got[i] == expected[i]);
  }
  CHECK(cs.C_p == 2 * pt * v(Var::Dptp) - 2 * p * v(Var::Dp2) - 2 * q * v(Var::Dqp) + ih * q);
  CHECK(cs.closure_expectation == ClosureExpectation::order_hbar);
}

TEST_CASE("linear time potential adds the printed λ terms") {
  const double lambda = 0.3;
  const ConstraintSet cs = build_constraints(LinearTimePotential{1.0, lambda});
  const auto base = printed_free(1.0);
  const std::array<PolyExpr, 5> lam = {t, v(Var::Dt2), v(Var::Dtpt) - 0.5 * ih, v(Var::Dtq), v(Var::Dtp)};
  const auto got = cs.all();
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(cs.lambda0[i] == base[i]);
    CHECK(cs.lambda1[i] == lam[i]);
    CHECK(got[i] == base[i] + lambda * lam[i]);
  }
}

TEST_CASE("slow polynomial potential changes C only") {
  SlowPolynomialPotential model{2.0, 0.01, 1.0, {1.0, -0.5}};
  const ConstraintSet cs = build_constraints(model);
  const auto base = printed_free(3.0);  // m² − V(0)
  CHECK(cs.lambda1[0] == t - 0.5 * t * t);
  for (std::size_t i = 1; i < 5; ++i) CHECK(cs.lambda1[i].is_zero());
  for (std::size_t i = 0; i < 5; ++i) CHECK(cs.lambda0[i] == base[i]);

  const ConstraintSet lin = build_constraints(LinearTimePotential{1.0, 0.01});
  const ConstraintSet slow = build_constraints(SlowPolynomialPotential{1.0, 0.01, 0.0, {1.0}});
  CHECK(lin.C == slow.C);
}

TEST_CASE("constraint renderings match the golden file") {
  std::ostringstream out;
  const std::pair<const char*, ModelSpec> models[] = {
      {"free m=1", FreeMassive{1.0}},
      {"massless", Massless{}},
      {"quadratic m=1", QuadraticPotential{1.0}},
      {"linear_time m=1 lambda=0.5", LinearTimePotential{1.0, 0.5}},
      {"slow_polynomial m=1 lambda=0.5 v0=0 vtilde=[1,2]", SlowPolynomialPotential{1.0, 0.5, 0.0, {1.0, 2.0}}},
  };
  for (const auto& [label, model] : models) {
    out << "# " << label << '\n';
    const auto cs = build_constraints(model);
    const auto all = cs.all();
    for (std::size_t i = 0; i < 5; ++i) out << constraint_name(i) << " = " << all[i].render() << '\n';
  }
  const std::string path = std::string(EFFCON_GOLDEN_DIR) + "/constraints.txt";
  if (std::getenv("EFFCON_UPDATE_GOLDEN")) std::ofstream(path) << out.str();
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream golden;
  golden << in.rdbuf();
  CHECK(golden.str() == out.str());
}

TEST_CASE("free closure is exact") {
  for (ModelSpec model : {ModelSpec{FreeMassive{1.0}}, ModelSpec{FreeMassive{0.0}}, ModelSpec{Massless{}}}) {
    const ClosureReport rep = closure_report(build_constraints(model));
    CHECK(rep.verdict == ClosureExpectation::exact);
    CHECK(rep.entries.size() == 25);
    for (const ClosureEntry& e : rep.entries) CHECK(e.residual.is_zero());
  }
  const ConstraintSet cs = build_constraints(FreeMassive{1.0});
  CHECK(bracket(cs.C_t, cs.C_pt) == 4 * pt * cs.C_pt - 2 * p * cs.C_p);
}

TEST_CASE("quadratic closure leaves the tabulated order-ħ residuals") {
  const ConstraintSet cs = build_constraints(QuadraticPotential{1.0});
  const ClosureReport rep = closure_report(cs);
  CHECK(rep.verdict == ClosureExpectation::order_hbar);
  for (const ClosureEntry& e : rep.entries) {
    CHECK(e.matches_expected);
    if (!e.residual.is_zero()) CHECK(e.residual.min_hbar_grade() >= 2);
  }
  const PolyExpr residual = bracket(cs.C_q, cs.C_p) - (2 * pt * cs.C_pt - 4 * p * cs.C_p - 4 * q * cs.C_q);
  const PolyExpr expected =
      4 * (v(Var::Dq2) * v(Var::Dp2) - 0.25 * PolyExpr::hbar(2)) - 4 * v(Var::Dqp) * v(Var::Dqp);
  CHECK(residual == expected);
}

TEST_CASE("self brackets vanish") {
  for (ModelSpec model : {ModelSpec{FreeMassive{1.0}}, ModelSpec{QuadraticPotential{1.0}},
                          ModelSpec{LinearTimePotential{1.0, 0.1}}}) {
    for (const PolyExpr& c : build_constraints(model).all()) CHECK(bracket(c, c).is_zero());
  }
}

TEST_CASE("time-dependent closure is order ħ") {
  CHECK(closure_report(build_constraints(LinearTimePotential{1.0, 0.2})).verdict == ClosureExpectation::order_hbar);
  CHECK(closure_report(build_constraints(SlowPolynomialPotential{1.0, 0.2, 0.0, {1.0, 1.0}})).verdict ==
        ClosureExpectation::order_hbar);
}

TEST_CASE("a corrupted constraint is rejected") {
  ConstraintSet cs = build_constraints(FreeMassive{1.0});
  cs.C_q = cs.C_q + q * p;
  cs.lambda0[3] = cs.C_q;
  CHECK_THROWS_AS(closure_report(cs), MalformedTable);
}

TEST_CASE("closure table text") {
  const std::string table = closure_report(build_constraints(QuadraticPotential{1.0})).to_table();
  CHECK(table.find("C_q") != std::string::npos);
  CHECK(table.find("hbar") != std::string::npos);
}

TEST_CASE("boost") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> vel(-0.95, 0.95);
  const ConstraintSet cs = build_constraints(FreeMassive{1.3});

  SUBCASE("zero velocity is the identity") {
    const MomentState s = random_moment_state(rng, 0.4);
    const MomentState b = boost(s, 0.0);
    for (Var x : kAllVars) CHECK(b[x] == s[x]);
  }
  SUBCASE("C is invariant and (C_pt, C_p) is contravariant") {
    for (int k = 0; k < 100; ++k) {
      const MomentState s = random_moment_state(rng, 0.4);
      const double u = vel(rng);
      const MomentState b = boost(s, u);
      CHECK(std::abs(evaluate(cs.C, b) - evaluate(cs.C, s)) <= 1e-12 * std::max(1.0, std::abs(evaluate(cs.C, s))));
      const double g = 1.0 / std::sqrt(1.0 - u * u);
      const Complex cpt = evaluate(cs.C_pt, s), cp = evaluate(cs.C_p, s);
      const Complex want_pt = g * (cpt - u * cp), want_p = g * (cp - u * cpt);
      const double scale = std::max({1.0, std::abs(want_pt), std::abs(want_p)});
      CHECK(std::abs(evaluate(cs.C_pt, b) - want_pt) <= 1e-12 * scale);
      CHECK(std::abs(evaluate(cs.C_p, b) - want_p) <= 1e-12 * scale);
    }
  }
  SUBCASE("group action") {
    for (int k = 0; k < 50; ++k) {
      const MomentState s = random_moment_state(rng, 0.4);
      const double v1 = vel(rng), v2 = vel(rng);
      const MomentState a = boost(boost(s, v1), v2);
      const MomentState b = boost(s, velocity_addition(v1, v2));
      for (Var x : kAllVars) CHECK(std::abs(a[x] - b[x]) <= 1e-12 * std::max(1.0, std::abs(b[x])));
    }
  }
  SUBCASE("superluminal velocity") {
    const MomentState s = random_moment_state(rng, 0.4);
    CHECK_THROWS_AS(boost(s, 1.0), InvalidVelocity);
    CHECK_THROWS_AS(boost(s, -1.5), InvalidVelocity);
  }
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(validate(ModelSpec{FreeMassive{-1.0}}), DomainError);
  CHECK_THROWS_AS(validate(ModelSpec{QuadraticPotential{std::nan("")}}), DomainError);
  CHECK_NOTHROW(validate(ModelSpec{LinearTimePotential{1.0, -0.5}}));
  CHECK(is_time_dependent(LinearTimePotential{1.0, 0.1}));
  CHECK_FALSE(is_time_dependent(QuadraticPotential{1.0}));
  CHECK(effective_mass_squared(SlowPolynomialPotential{2.0, 0.1, 1.0, {1.0}}) == doctest::Approx(3.0));
  CHECK(time_potential(LinearTimePotential{1.0, 0.5}, 2.0) == doctest::Approx(1.0));
  CHECK(relative(time_potential(SlowPolynomialPotential{1.0, 0.5, 0.0, {1.0, 2.0}}, 2.0), 0.5 * (2.0 + 8.0)) < 1e-15);
}

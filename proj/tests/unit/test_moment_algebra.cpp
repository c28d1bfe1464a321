#include <doctest.h>

#include <random>

#include "effcon/moment_algebra.hpp"
#include "support.hpp"

using namespace effcon;

namespace {

PolyExpr v(Var x) { return PolyExpr(x); }
const PolyExpr ih = PolyExpr::i() * PolyExpr::hbar();

PolyExpr random_poly(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, kNumVars - 1);
  std::uniform_int_distribution<int> coef(-3, 3);
  PolyExpr out;
  for (int k = 0; k < 3; ++k) {
    PolyExpr term(Complex(coef(rng), coef(rng)));
    const int degree = k;  // constant, linear and quadratic pieces
    for (int d = 0; d < degree; ++d) term = term * PolyExpr(var_at(pick(rng)));
    out += term;
  }
  return out;
}

}  // namespace

TEST_CASE("table entries") {
  CHECK(base_bracket(Var::t, Var::pt) == PolyExpr(1));
  CHECK(base_bracket(Var::pt, Var::t) == PolyExpr(-1));
  CHECK(base_bracket(Var::q, Var::p) == PolyExpr(1));
  CHECK(base_bracket(Var::Dt2, Var::Dtpt) == 2 * v(Var::Dt2));
  CHECK(base_bracket(Var::q, Var::Dp2).is_zero());
  CHECK(base_bracket(Var::Dq2, Var::Dp2) == 4 * v(Var::Dqp));
}

TEST_CASE("expectation values commute with moments") {
  for (std::size_t e = 0; e < kNumBasic; ++e) {
    for (Var m : kMoments) {
      CHECK(base_bracket(var_at(e), m).is_zero());
      CHECK(base_bracket(m, var_at(e)).is_zero());
    }
  }
}

TEST_CASE("base table is antisymmetric and linear in moments") {
  for (Var a : kAllVars) {
    for (Var b : kAllVars) {
      const PolyExpr ab = base_bracket(a, b);
      CHECK(ab + base_bracket(b, a) == PolyExpr());
      for (const auto& [mono, c] : ab.terms()) {
        CHECK(mono.total_degree() <= 1);
        CHECK(mono.hbar_power() == 0);
      }
    }
  }
}

TEST_CASE("Jacobi identity on all 14^3 base triples") {
  std::size_t failures = 0;
  for (Var a : kAllVars) {
    for (Var b : kAllVars) {
      for (Var c : kAllVars) {
        const PolyExpr j = bracket(v(a), bracket(v(b), v(c))) + bracket(v(b), bracket(v(c), v(a))) +
                           bracket(v(c), bracket(v(a), v(b)));
        failures += !j.is_zero();
      }
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("Leibniz extension: antisymmetry and Jacobi on random polynomials") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 40; ++k) {
    const PolyExpr a = random_poly(rng), b = random_poly(rng), c = random_poly(rng);
    CHECK(bracket(a, a).is_zero());
    CHECK((bracket(a, b) + bracket(b, a)).is_zero());
    CHECK((bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b))).is_zero());
  }
}

TEST_CASE("covariance determinant is a Casimir of the q-p moment sector") {
  const PolyExpr det = v(Var::Dq2) * v(Var::Dp2) - v(Var::Dqp) * v(Var::Dqp);
  for (Var m : {Var::Dq2, Var::Dqp, Var::Dp2, Var::q, Var::p}) CHECK(bracket(det, v(m)).is_zero());
}

TEST_CASE("bracket of the free constraints") {
  const PolyExpr pt = v(Var::pt), p = v(Var::p), m2(2.25);
  const PolyExpr C = pt * pt - p * p - m2 + v(Var::Dpt2) - v(Var::Dp2);
  const PolyExpr Ct = 2 * pt * v(Var::Dtpt) + ih * pt - 2 * p * v(Var::Dtp);
  const PolyExpr Cpt = 2 * pt * v(Var::Dpt2) - 2 * p * v(Var::Dptp);
  CHECK(bracket(C, Ct) == -2 * Cpt);
}

TEST_CASE("hbar grading") {
  CHECK(Monomial{Var::Dp2}.hbar_grade() == 1);
  CHECK((Monomial{Var::pt} * Monomial::hbar()).hbar_grade() == 1);
  CHECK((Monomial{Var::Dqp} * Monomial::hbar()).hbar_grade() == 2);
  CHECK(Monomial{Var::q, Var::p}.hbar_grade() == 0);
  CHECK((v(Var::Dq2) * v(Var::Dp2) + PolyExpr::hbar(2)).min_hbar_grade() == 2);
}

TEST_CASE("evaluate") {
  AlgebraContext ctx(0.5);
  MomentState s(ctx);
  CHECK(evaluate(PolyExpr(1), s) == Complex(1.0));
  s[Var::pt] = 3.0;
  s[Var::p] = 3.0;
  CHECK(evaluate(v(Var::pt) * v(Var::pt) - v(Var::p) * v(Var::p), s) == Complex(0.0));
  CHECK(evaluate(ih * v(Var::p), s) == Complex(0.0, 1.5));
}

TEST_CASE("structure matrix agrees with the table") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  MomentState s(AlgebraContext(0.7));
  for (Var x : kAllVars) s[x] = Complex(n(rng), n(rng));
  const StructureMatrix w = structure_matrix(s);
  for (Var a : kAllVars) {
    for (Var b : kAllVars) CHECK(std::abs(w[index(a)][index(b)] - evaluate(base_bracket(a, b), s)) < 1e-14);
  }
}

TEST_CASE("render and parse round trip") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    PolyExpr a = random_poly(rng) * Complex(0.1, -1.0 / 3.0) + ih * v(Var::Dqp);
    const std::string text = a.render();
    const PolyExpr b = PolyExpr::parse(text);
    CHECK(b == a);
    CHECK(b.render() == text);
  }
  CHECK(PolyExpr().render() == "0");
  CHECK(PolyExpr::parse("0").is_zero());
  CHECK_THROWS_AS(PolyExpr::parse("(1+0i)*nonsense"), std::invalid_argument);
}

TEST_CASE("variable names round trip") {
  for (Var x : kAllVars) {
    REQUIRE(parse_var(name(x)).has_value());
    CHECK(*parse_var(name(x)) == x);
  }
  for (Var m : kMoments) {
    const auto [a, b] = moment_factors(m);
    CHECK(moment_of(a, b) == m);
    CHECK(moment_of(b, a) == m);
  }
}

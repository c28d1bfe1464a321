#include "effcon/moment_algebra.hpp"

#include <stdexcept>
#include <string>

namespace effcon {

namespace {

constexpr std::array<std::string_view, kNumVars> kNames = {
    "t", "p_t", "q", "p", "Dt2", "Dtpt", "Dpt2", "Dq2", "Dqp", "Dp2", "Dtq", "Dptp", "Dtp", "Dptq"};

constexpr std::array<std::pair<Var, Var>, kNumMoments> kFactors = {{
    {Var::t, Var::t},
    {Var::t, Var::pt},
    {Var::pt, Var::pt},
    {Var::q, Var::q},
    {Var::q, Var::p},
    {Var::p, Var::p},
    {Var::t, Var::q},
    {Var::pt, Var::p},
    {Var::t, Var::p},
    {Var::pt, Var::q},
}};

// One cell of the moment bracket table: at most two moments with small
// integer coefficients.
struct Cell {
  int c1 = 0;
  Var v1 = Var::t;
  int c2 = 0;
  Var v2 = Var::t;
};

constexpr Cell Z{};
constexpr Cell m(int c, Var v) { return {c, v, 0, Var::t}; }
constexpr Cell m(int c1, Var v1, int c2, Var v2) { return {c1, v1, c2, v2}; }

using V = Var;

// Rows and columns follow kMoments: (Δt)², Δ(tp_t), (Δp_t)², (Δq)², Δ(qp),
// (Δp)², Δ(tq), Δ(p_tp), Δ(tp), Δ(p_tq). Entry [r][c] = {row, column}.
constexpr std::array<std::array<Cell, kNumMoments>, kNumMoments> kMomentTable = {{
    // (Δt)²
    {Z, m(2, V::Dt2), m(4, V::Dtpt), Z, Z, Z, Z, m(2, V::Dtp), Z, m(2, V::Dtq)},
    // Δ(tp_t)
    {m(-2, V::Dt2), Z, m(2, V::Dpt2), Z, Z, Z, m(-1, V::Dtq), m(1, V::Dptp), m(-1, V::Dtp),
     m(1, V::Dptq)},
    // (Δp_t)²
    {m(-4, V::Dtpt), m(-2, V::Dpt2), Z, Z, Z, Z, m(-2, V::Dptq), Z, m(-2, V::Dptp), Z},
    // (Δq)²
    {Z, Z, Z, Z, m(2, V::Dq2), m(4, V::Dqp), Z, m(2, V::Dptq), m(2, V::Dtq), Z},
    // Δ(qp)
    {Z, Z, Z, m(-2, V::Dq2), Z, m(2, V::Dp2), m(-1, V::Dtq), m(1, V::Dptp), m(1, V::Dtp),
     m(-1, V::Dptq)},
    // (Δp)²
    {Z, Z, Z, m(-4, V::Dqp), m(-2, V::Dp2), Z, m(-2, V::Dtp), Z, Z, m(-2, V::Dptp)},
    // Δ(tq)
    {Z, m(1, V::Dtq), m(2, V::Dptq), Z, m(1, V::Dtq), m(2, V::Dtp), Z, m(1, V::Dtpt, 1, V::Dqp),
     m(1, V::Dt2), m(1, V::Dq2)},
    // Δ(p_tp)
    {m(-2, V::Dtp), m(-1, V::Dptp), Z, m(-2, V::Dptq), m(-1, V::Dptp), Z,
     m(-1, V::Dtpt, -1, V::Dqp), Z, m(-1, V::Dp2), m(-1, V::Dpt2)},
    // Δ(tp)
    {Z, m(1, V::Dtp), m(2, V::Dptp), m(-2, V::Dtq), m(-1, V::Dtp), Z, m(-1, V::Dt2), m(1, V::Dp2), Z,
     m(1, V::Dqp, -1, V::Dtpt)},
    // Δ(p_tq)
    {m(-2, V::Dtq), m(-1, V::Dptq), Z, Z, m(1, V::Dptq), m(2, V::Dptp), m(-1, V::Dq2),
     m(1, V::Dpt2), m(1, V::Dtpt, -1, V::Dqp), Z},
}};

PolyExpr cell_to_poly(const Cell& c) {
  PolyExpr out;
  if (c.c1 != 0) out += PolyExpr(c.v1) * c.c1;
  if (c.c2 != 0) out += PolyExpr(c.v2) * c.c2;
  return out;
}

int canonical_bracket(Var a, Var b) {
  if (a == Var::t && b == Var::pt) return 1;
  if (a == Var::pt && b == Var::t) return -1;
  if (a == Var::q && b == Var::p) return 1;
  if (a == Var::p && b == Var::q) return -1;
  return 0;
}

Complex ipow(Complex base, unsigned e) {
  Complex r{1.0, 0.0};
  while (e != 0) {
    if (e & 1U) r *= base;
    base *= base;
    e >>= 1U;
  }
  return r;
}

}  // namespace

std::string_view name(Var v) { return kNames[index(v)]; }

std::optional<Var> parse_var(std::string_view text) {
  for (std::size_t i = 0; i < kNumVars; ++i) {
    if (kNames[i] == text) return var_at(i);
  }
  return std::nullopt;
}

std::pair<Var, Var> moment_factors(Var moment) {
  if (!is_moment(moment)) throw std::invalid_argument("not a moment: " + std::string(name(moment)));
  return kFactors[index(moment) - kNumBasic];
}

Var moment_of(Var a, Var b) {
  if (is_moment(a) || is_moment(b)) throw std::invalid_argument("moment_of expects basic variables");
  for (std::size_t k = 0; k < kNumMoments; ++k) {
    const auto [x, y] = kFactors[k];
    if ((x == a && y == b) || (x == b && y == a)) return kMoments[k];
  }
  throw std::logic_error("unreachable: every pair of basic variables has a moment");
}

AlgebraContext::AlgebraContext(double hbar) : hbar_(hbar) {
  if (!(hbar > 0.0)) throw std::invalid_argument("hbar must be positive");
}

PolyExpr base_bracket(Var a, Var b) {
  if (!is_moment(a) && !is_moment(b)) return PolyExpr(canonical_bracket(a, b));
  if (is_moment(a) != is_moment(b)) return PolyExpr{};
  return cell_to_poly(kMomentTable[index(a) - kNumBasic][index(b) - kNumBasic]);
}

PolyExpr bracket(const PolyExpr& a, const PolyExpr& b) {
  std::array<PolyExpr, kNumVars> da;
  std::array<PolyExpr, kNumVars> db;
  for (Var v : kAllVars) {
    da[index(v)] = a.derivative(v);
    db[index(v)] = b.derivative(v);
  }
  PolyExpr out;
  for (Var x : kAllVars) {
    if (da[index(x)].is_zero()) continue;
    for (Var y : kAllVars) {
      if (db[index(y)].is_zero()) continue;
      const PolyExpr xy = base_bracket(x, y);
      if (xy.is_zero()) continue;
      out += da[index(x)] * xy * db[index(y)];
    }
  }
  return out;
}

Complex evaluate(const PolyExpr& expr, const MomentState& s) {
  Complex total{};
  for (const auto& [mono, coeff] : expr.terms()) {
    Complex term = coeff;
    for (Var v : kAllVars) {
      if (const unsigned e = mono.degree(v); e != 0) term *= ipow(s[v], e);
    }
    if (const unsigned h = mono.hbar_power(); h != 0) term *= ipow(Complex{s.hbar(), 0.0}, h);
    total += term;
  }
  return total;
}

StructureMatrix structure_matrix(const MomentState& s) {
  StructureMatrix omega{};
  for (Var a : kAllVars) {
    for (Var b : kAllVars) omega[index(a)][index(b)] = evaluate(base_bracket(a, b), s);
  }
  return omega;
}

Complex bracket_from_gradients(const Gradient& df, const Gradient& dg, const StructureMatrix& omega) {
  Complex total{};
  for (std::size_t a = 0; a < kNumVars; ++a) {
    if (df[a] == Complex{}) continue;
    for (std::size_t b = 0; b < kNumVars; ++b) {
      if (dg[b] == Complex{} || omega[a][b] == Complex{}) continue;
      total += df[a] * omega[a][b] * dg[b];
    }
  }
  return total;
}

}  // namespace effcon

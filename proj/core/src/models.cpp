#include "effcon/models.hpp"

#include <cmath>
#include <fmt/format.h>

#include "effcon/errors.hpp"

namespace effcon {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_mass(double m) {
  if (!std::isfinite(m) || m < 0.0) throw DomainError(fmt::format("mass must be finite and >= 0, got {}", m));
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(fmt::format("{} must be finite", what));
}

PolyExpr X(Var v) { return PolyExpr(v); }
PolyExpr ihbar() { return PolyExpr::i() * PolyExpr::hbar(); }

// λ-free part shared by the free models: everything except the mass term.
std::array<PolyExpr, kNumConstraints> free_constraints(double m2) {
  const PolyExpr pt = X(Var::pt);
  const PolyExpr p = X(Var::p);
  return {
      pt * pt - p * p - PolyExpr(m2) + X(Var::Dpt2) - X(Var::Dp2),
      2 * pt * X(Var::Dtpt) + ihbar() * pt - 2 * p * X(Var::Dtp),
      2 * pt * X(Var::Dpt2) - 2 * p * X(Var::Dptp),
      2 * pt * X(Var::Dptq) - 2 * p * X(Var::Dqp) - ihbar() * p,
      2 * pt * X(Var::Dptp) - 2 * p * X(Var::Dp2),
  };
}

std::array<PolyExpr, kNumConstraints> quadratic_constraints(double m2) {
  auto c = free_constraints(m2);
  const PolyExpr q = X(Var::q);
  c[0] -= q * q + X(Var::Dq2);
  c[1] -= 2 * q * X(Var::Dtq);
  c[2] -= 2 * q * X(Var::Dptq);
  c[3] -= 2 * q * X(Var::Dq2);
  c[4] += -2 * q * X(Var::Dqp) + ihbar() * q;
  return c;
}

}  // namespace

void validate(const ModelSpec& model) {
  std::visit(overloaded{
                 [](const FreeMassive& f) { require_mass(f.m); },
                 [](const Massless&) {},
                 [](const QuadraticPotential& f) { require_mass(f.m); },
                 [](const LinearTimePotential& f) {
                   require_mass(f.m);
                   require_finite(f.lambda, "lambda");
                 },
                 [](const SlowPolynomialPotential& f) {
                   require_mass(f.m);
                   require_finite(f.lambda, "lambda");
                   require_finite(f.v0, "v0");
                   if (f.vtilde.empty()) throw DomainError("vtilde needs at least one coefficient");
                   for (double c : f.vtilde) require_finite(c, "vtilde coefficient");
                   if (f.m * f.m - f.v0 < 0.0) throw DomainError("m² − V(0) must be non-negative");
                 },
             },
             model);
}

std::string model_name(const ModelSpec& model) {
  return std::visit(overloaded{
                        [](const FreeMassive&) { return std::string("free_massive"); },
                        [](const Massless&) { return std::string("massless"); },
                        [](const QuadraticPotential&) { return std::string("quadratic_potential"); },
                        [](const LinearTimePotential&) { return std::string("linear_time_potential"); },
                        [](const SlowPolynomialPotential&) { return std::string("slow_polynomial_potential"); },
                    },
                    model);
}

bool is_time_dependent(const ModelSpec& model) {
  return std::holds_alternative<LinearTimePotential>(model) || std::holds_alternative<SlowPolynomialPotential>(model);
}

double effective_mass_squared(const ModelSpec& model) {
  return std::visit(overloaded{
                        [](const FreeMassive& f) { return f.m * f.m; },
                        [](const Massless&) { return 0.0; },
                        [](const QuadraticPotential& f) { return f.m * f.m; },
                        [](const LinearTimePotential& f) { return f.m * f.m; },
                        [](const SlowPolynomialPotential& f) { return f.m * f.m - f.v0; },
                    },
                    model);
}

double time_potential(const ModelSpec& model, double t) {
  if (const auto* lin = std::get_if<LinearTimePotential>(&model)) return lin->lambda * t;
  if (const auto* poly = std::get_if<SlowPolynomialPotential>(&model)) {
    // Horner on t·(c0 + c1 t + ...).
    double acc = 0.0;
    for (auto it = poly->vtilde.rbegin(); it != poly->vtilde.rend(); ++it) acc = acc * t + *it;
    return poly->lambda * acc * t;
  }
  return 0.0;
}

double time_potential_derivative(const ModelSpec& model, double t) {
  if (const auto* lin = std::get_if<LinearTimePotential>(&model)) return lin->lambda;
  if (const auto* poly = std::get_if<SlowPolynomialPotential>(&model)) {
    double acc = 0.0;
    for (std::size_t k = poly->vtilde.size(); k-- > 0;) acc = acc * t + static_cast<double>(k + 1) * poly->vtilde[k];
    return poly->lambda * acc;
  }
  return 0.0;
}

std::string_view constraint_name(std::size_t i) {
  static constexpr std::array<std::string_view, kNumConstraints> names = {"C", "C_t", "C_pt", "C_q", "C_p"};
  return names.at(i);
}

ConstraintSet build_constraints(const ModelSpec& model) {
  validate(model);
  ConstraintSet cs;
  cs.model = model;
  const double m2 = effective_mass_squared(model);

  if (std::holds_alternative<QuadraticPotential>(model)) {
    cs.lambda0 = quadratic_constraints(m2);
    cs.closure_expectation = ClosureExpectation::order_hbar;
  } else {
    cs.lambda0 = free_constraints(m2);
  }

  double lambda = 0.0;
  if (const auto* lin = std::get_if<LinearTimePotential>(&model)) {
    lambda = lin->lambda;
    cs.lambda1 = {
        X(Var::t),
        X(Var::Dt2),
        X(Var::Dtpt) - Complex{0.0, 0.5} * PolyExpr::hbar(),
        X(Var::Dtq),
        X(Var::Dtp),
    };
    cs.closure_expectation = ClosureExpectation::order_hbar;
  } else if (const auto* poly = std::get_if<SlowPolynomialPotential>(&model)) {
    lambda = poly->lambda;
    PolyExpr v;
    PolyExpr tk = X(Var::t);
    for (double c : poly->vtilde) {
      v += c * tk;
      tk = tk * X(Var::t);
    }
    cs.lambda1[0] = v;
    cs.closure_expectation = ClosureExpectation::order_hbar;
  }

  std::array<PolyExpr, kNumConstraints> full;
  for (std::size_t i = 0; i < kNumConstraints; ++i) full[i] = cs.lambda0[i] + lambda * cs.lambda1[i];
  cs.C = full[0];
  cs.C_t = full[1];
  cs.C_pt = full[2];
  cs.C_q = full[3];
  cs.C_p = full[4];
  return cs;
}

double velocity_addition(double v1, double v2) { return (v1 + v2) / (1.0 + v1 * v2); }

MomentState boost(const MomentState& s, double v) {
  if (!(std::abs(v) < 1.0)) throw InvalidVelocity(fmt::format("|v| must be < 1, got {}", v));
  const double g = 1.0 / std::sqrt((1.0 - v) * (1.0 + v));
  // Basic order (t, p_t, q, p).
  double L[4][4] = {};
  L[0][0] = g;
  L[0][2] = g * v;
  L[1][1] = g;
  L[1][3] = -g * v;
  L[2][2] = g;
  L[2][0] = g * v;
  L[3][3] = g;
  L[3][1] = -g * v;

  Complex x[4];
  Complex S[4][4];
  for (std::size_t a = 0; a < 4; ++a) {
    x[a] = s[var_at(a)];
    for (std::size_t b = 0; b < 4; ++b) S[a][b] = s[moment_of(var_at(a), var_at(b))];
  }

  MomentState out(s.context());
  for (std::size_t a = 0; a < 4; ++a) {
    Complex acc{};
    for (std::size_t b = 0; b < 4; ++b) acc += L[a][b] * x[b];
    out[var_at(a)] = acc;
  }
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a; b < 4; ++b) {
      Complex acc{};
      for (std::size_t c = 0; c < 4; ++c) {
        if (L[a][c] == 0.0) continue;
        for (std::size_t d = 0; d < 4; ++d) acc += L[a][c] * S[c][d] * L[b][d];
      }
      out[moment_of(var_at(a), var_at(b))] = acc;
    }
  }
  return out;
}

}  // namespace effcon

#include "effcon/dynamics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "effcon/errors.hpp"
#include "effcon/jet.hpp"

namespace effcon {

namespace odeint = boost::numeric::odeint;

namespace {

using OdeState = std::array<double, 5>;  // q, p, (Δq)², Δ(qp), (Δp)²

ReducedState to_reduced(double t, const OdeState& x) { return {t, x[0], x[1], x[2], x[3], x[4]}; }
OdeState to_ode(const ReducedState& r) { return {r.q, r.p, r.dq2, r.dqp, r.dp2}; }

StateDerivative scaled(StateDerivative d, double dir) {
  d.q *= dir;
  d.p *= dir;
  d.dq2 *= dir;
  d.dqp *= dir;
  d.dp2 *= dir;
  d.t = 1.0;
  return d;
}

Jet expanded_energy_jet(const ModelSpec& model, const std::array<Jet, kNumVars>& x) {
  const Jet& p = x[index(Var::p)];
  const Jet& P = x[index(Var::Dp2)];
  if (std::holds_alternative<Massless>(model)) return abs_real(p);
  if (std::holds_alternative<QuadraticPotential>(model)) {
    const Jet& q = x[index(Var::q)];
    const Jet& Q = x[index(Var::Dq2)];
    const Jet& X = x[index(Var::Dqp)];
    const Jet m2(effective_mass_squared(model));
    const Jet H2 = p * p + q * q + m2;
    const Jet corr = (q * q + m2) * P - 2.0 * q * p * X + (p * p + m2) * Q;
    return sqrt(H2) * (1.0 + corr / (2.0 * H2 * H2));
  }
  const Jet& t = x[index(Var::t)];
  Jet V(time_potential(model, t.v.real()));
  V.d = t.d;
  for (auto& g : V.d) g *= time_potential_derivative(model, t.v.real());
  const Jet M2 = Jet(effective_mass_squared(model)) - V;
  const Jet h2 = p * p + M2;
  return sqrt(h2) * (1.0 + M2 * P / (2.0 * h2 * h2));
}

}  // namespace

StateDerivative effective_rhs(const ModelSpec& model, const ReducedState& r, Branch sign) {
  const double dir = -sigma(sign);
  StateDerivative d;
  const double q = r.q, p = r.p, Q = r.dq2, X = r.dqp, P = r.dp2;

  if (std::holds_alternative<Massless>(model)) {
    if (std::abs(p) < 1e-12 * std::max({1.0, std::abs(q), std::sqrt(std::abs(P))})) {
      throw DomainError("massless model is undefined at p = 0");
    }
    d.q = p > 0.0 ? 1.0 : -1.0;
    return scaled(d, dir);
  }

  if (std::holds_alternative<QuadraticPotential>(model)) {
    const double m2 = effective_mass_squared(model);
    const double H2 = p * p + q * q + m2;
    if (!(H2 > 0.0)) throw DomainError("p² + q² + m² must be positive");
    const double H = std::sqrt(H2);
    const double H3 = H2 * H;
    const double H5 = H2 * H3;
    const double a = q * q + m2;
    const double b = p * p + m2;
    d.q = p / H + (p * Q * (2.0 * q * q - b) + q * X * (4.0 * p * p - 2.0 * a) - 3.0 * p * P * a) / (2.0 * H5);
    d.p = -q / H + (3.0 * q * Q * b - p * X * (4.0 * q * q - 2.0 * b) - q * P * (2.0 * p * p - a)) / (2.0 * H5);
    d.dq2 = (2.0 * X * a - 2.0 * Q * q * p) / H3;
    d.dqp = (P * a - Q * b) / H3;
    d.dp2 = (2.0 * P * q * p - 2.0 * X * b) / H3;
    return scaled(d, dir);
  }

  const double M2 = effective_mass_squared(model) - time_potential(model, r.t);
  const double h2 = p * p + M2;
  if (!(h2 > 0.0)) throw DomainError(fmt::format("p² + m² = {} must be positive", h2));
  const double h = std::sqrt(h2);
  const double h3 = h2 * h;
  const double h5 = h2 * h3;
  d.q = p / h - 1.5 * M2 * P * p / h5;
  d.dq2 = 2.0 * X * M2 / h3;
  d.dqp = P * M2 / h3;
  return scaled(d, dir);
}

StateDerivative effective_rhs_generic(const ModelSpec& model, const ReducedState& r, const AlgebraContext& ctx,
                                      Branch sign) {
  MomentState s(ctx);
  s[Var::t] = r.t;
  s[Var::q] = r.q;
  s[Var::p] = r.p;
  s[Var::Dq2] = r.dq2;
  s[Var::Dqp] = r.dqp;
  s[Var::Dp2] = r.dp2;
  const Jet E = expanded_energy_jet(model, seed(s));
  const StructureMatrix omega = structure_matrix(s);
  auto flow = [&](Var v) {
    Gradient e{};
    e[index(v)] = 1.0;
    return bracket_from_gradients(e, E.d, omega).real();
  };
  StateDerivative d;
  d.q = flow(Var::q);
  d.p = flow(Var::p);
  d.dq2 = flow(Var::Dq2);
  d.dqp = flow(Var::Dqp);
  d.dp2 = flow(Var::Dp2);
  return scaled(d, -sigma(sign));
}

void validate(const IntegratorOptions& opts) {
  if (!(opts.step > 0.0)) throw DomainError("integrator step must be positive");
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0)) throw DomainError("integrator tolerances must be positive");
  if (!(opts.moment_bound > 0.0)) throw DomainError("moment bound must be positive");
  if (opts.sample_every == 0) throw DomainError("sample_every must be at least 1");
}

namespace {

struct Stop {};

class Recorder {
 public:
  Recorder(const ModelSpec& model, const AlgebraContext& ctx, const IntegratorOptions& opts, double bound,
           Trajectory& out)
      : model_(model), ctx_(ctx), opts_(opts), bound_(bound), out_(out) {}

  // Returns true when integration should stop.
  bool record(double t, const OdeState& x) {
    for (double v : x) {
      if (!std::isfinite(v)) throw IntegrationFailure(fmt::format("non-finite state at t = {}", t));
    }
    Sample s;
    s.time = t;
    s.state = to_reduced(t, x);
    s.E = energy_expanded(model_, s.state);
    if (!check_admissible(s.state, ctx_, opts_.admissibility_tolerance).ok()) s.flags |= kInadmissible;
    const double biggest = std::max({std::abs(s.state.dq2), std::abs(s.state.dqp), std::abs(s.state.dp2)});
    if (biggest > bound_) s.flags |= kMomentBound;
    out_.samples.push_back(s);
    if (s.flags != 0 && !out_.breakdown_index) out_.breakdown_index = out_.samples.size() - 1;
    return s.flags != 0 && opts_.breakdown == BreakdownPolicy::stop;
  }

 private:
  const ModelSpec& model_;
  const AlgebraContext& ctx_;
  const IntegratorOptions& opts_;
  double bound_;
  Trajectory& out_;
};

}  // namespace

Trajectory integrate(const ModelSpec& model, const ReducedState& r0, std::pair<double, double> t_span,
                     const AlgebraContext& ctx, const IntegratorOptions& opts, Branch sign) {
  validate(model);
  validate(opts);
  const auto [t0, t1] = t_span;
  if (!(t1 > t0)) throw DomainError("time span must be increasing");
  if (const auto adm = check_admissible(r0, ctx, opts.admissibility_tolerance); !adm.ok()) {
    throw DomainError("initial state is not admissible: " + adm.message());
  }

  Trajectory traj;
  traj.model = model;
  traj.sign = sign;
  traj.options = opts;
  traj.hbar = ctx.hbar();

  const double mass = std::sqrt(std::max(0.0, effective_mass_squared(model)));
  const double scale = std::max({std::abs(r0.q), std::abs(r0.p), mass, std::sqrt(ctx.hbar())});
  Recorder rec(model, ctx, opts, opts.moment_bound * scale * scale, traj);

  auto system = [&](const OdeState& x, OdeState& dxdt, double t) {
    const StateDerivative d = effective_rhs(model, to_reduced(t, x), sign);
    dxdt = to_ode(d);
  };

  OdeState x = to_ode(r0);
  if (rec.record(t0, x)) return traj;

  if (opts.method == Method::fixed_rk4) {
    odeint::runge_kutta4<OdeState> stepper;
    const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / opts.step - 1e-9));
    double t = t0;
    for (std::size_t i = 0; i < n; ++i) {
      const double next = (i + 1 == n) ? t1 : t0 + static_cast<double>(i + 1) * opts.step;
      stepper.do_step(system, x, t, next - t);
      t = next;
      if ((i + 1) % opts.sample_every == 0 || i + 1 == n) {
        if (rec.record(t, x)) break;
      }
    }
    return traj;
  }

  std::vector<double> times;
  for (std::size_t k = 1;; ++k) {
    const double t = t0 + static_cast<double>(k) * opts.step;
    if (t >= t1 - 1e-12 * opts.step) break;
    times.push_back(t);
  }
  times.insert(times.begin(), t0);
  times.push_back(t1);
  auto stepper = odeint::make_dense_output(opts.atol, opts.rtol, odeint::runge_kutta_dopri5<OdeState>());
  bool first = true;
  try {
    odeint::integrate_times(stepper, system, x, times.begin(), times.end(), opts.step,
                            [&](const OdeState& state, double t) {
                              if (first) {
                                first = false;
                                return;
                              }
                              if (rec.record(t, state)) throw Stop{};
                            });
  } catch (const Stop&) {
  } catch (const Error&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw IntegrationFailure(fmt::format("adaptive integration failed: {}", e.what()));
  }
  return traj;
}

std::vector<std::pair<double, double>> classical_trajectory(const QuadraticPotential& model, double A, double B,
                                                            const std::vector<double>& times) {
  const double H = std::sqrt(A * A + B * B + model.m * model.m);
  std::vector<std::pair<double, double>> out;
  out.reserve(times.size());
  for (double t : times) {
    const double s = std::sin(t / H), c = std::cos(t / H);
    out.emplace_back(A * s + B * c, A * c - B * s);
  }
  return out;
}

}  // namespace effcon

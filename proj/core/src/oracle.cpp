#include "effcon/oracle.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <cmath>

#include "effcon/errors.hpp"

namespace effcon {

double sqrt_eigenvalue(std::size_t n, double hbar, double m) {
  return std::sqrt(2.0 * (static_cast<double>(n) + 0.5) * hbar + m * m);
}

namespace {

// log of the Poisson weight e^{−a²} a^{2n} / n!.
double log_poisson(std::size_t n, double abs_alpha) {
  if (abs_alpha == 0.0) return n == 0 ? 0.0 : -INFINITY;
  const double dn = static_cast<double>(n);
  return -abs_alpha * abs_alpha + 2.0 * dn * std::log(abs_alpha) - std::lgamma(dn + 1.0);
}

// Upper tail Σ_{n ≥ k} of the Poisson weights, summed until negligible.
double poisson_tail(std::size_t k, double abs_alpha) {
  double acc = 0.0;
  for (std::size_t n = k;; ++n) {
    const double w = std::exp(log_poisson(n, abs_alpha));
    acc += w;
    if (static_cast<double>(n) > abs_alpha * abs_alpha && w < 1e-300 + 1e-18 * acc) break;
    if (n > k + 100000) break;
  }
  return acc;
}

}  // namespace

std::size_t coherent_cutoff(double abs_alpha, double tail) {
  auto n = static_cast<std::size_t>(std::ceil(abs_alpha * abs_alpha + 10.0 * abs_alpha + 20.0));
  while (poisson_tail(n - 10, abs_alpha) >= tail) n += 10;
  return n;
}

FockVector::FockVector(std::shared_ptr<const std::vector<Complex>> c0, double hbar, double m, double time)
    : c0_(std::move(c0)), hbar_(hbar), m_(m), time_(time) {}

FockVector FockVector::coherent(Complex alpha, double hbar, double m) {
  return coherent(alpha, hbar, m, coherent_cutoff(std::abs(alpha)));
}

FockVector FockVector::coherent(Complex alpha, double hbar, double m, std::size_t levels) {
  if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
  if (levels == 0) throw DomainError("need at least one Fock level");
  const double a = std::abs(alpha);
  const double phase = std::arg(alpha);
  std::vector<Complex> c(levels);
  for (std::size_t n = 0; n < levels; ++n) {
    const double mag = std::exp(0.5 * log_poisson(n, a));
    c[n] = std::polar(mag, static_cast<double>(n) * phase);
  }
  // lgamma cancellation near n ~ |α|² costs ~|α|²·eps per weight; renormalize.
  double total = 0.0;
  for (const Complex& z : c) total += std::norm(z);
  const double scale = 1.0 / std::sqrt(total);
  for (Complex& z : c) z *= scale;
  return FockVector(std::make_shared<const std::vector<Complex>>(std::move(c)), hbar, m, 0.0);
}

FockVector FockVector::from_coefficients(std::vector<Complex> c, double hbar, double m) {
  if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
  if (c.empty()) throw DomainError("need at least one Fock level");
  return FockVector(std::make_shared<const std::vector<Complex>>(std::move(c)), hbar, m, 0.0);
}

FockVector FockVector::evolve(double t) const { return FockVector(c0_, hbar_, m_, time_ + t); }

std::vector<Complex> FockVector::coefficients() const {
  std::vector<Complex> c(*c0_);
  if (time_ == 0.0) return c;
  for (std::size_t n = 0; n < c.size(); ++n) {
    c[n] *= std::polar(1.0, -sqrt_eigenvalue(n, hbar_, m_) * time_ / hbar_);
  }
  return c;
}

double FockVector::norm() const {
  double acc = 0.0;
  for (const Complex& z : coefficients()) acc += std::norm(z);
  return std::sqrt(acc);
}

double FockVector::energy_expectation() const {
  double acc = 0.0;
  for (std::size_t n = 0; n < c0_->size(); ++n) acc += std::norm((*c0_)[n]) * sqrt_eigenvalue(n, hbar_, m_);
  return acc;
}

ReducedState observables(const FockVector& f) {
  const std::vector<Complex> c = f.coefficients();
  const std::size_t N = c.size();
  Complex a1{};  // ⟨a⟩
  Complex a2{};  // ⟨a²⟩
  double num = 0.0;
  double norm = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    const double dn = static_cast<double>(n);
    norm += std::norm(c[n]);
    num += dn * std::norm(c[n]);
    if (n + 1 < N) a1 += std::sqrt(dn + 1.0) * std::conj(c[n]) * c[n + 1];
    if (n + 2 < N) a2 += std::sqrt((dn + 1.0) * (dn + 2.0)) * std::conj(c[n]) * c[n + 2];
  }
  const double h = f.hbar();
  ReducedState r;
  r.t = f.time();
  r.q = std::sqrt(2.0 * h) * a1.real() / norm;
  r.p = std::sqrt(2.0 * h) * a1.imag() / norm;
  const double q2 = 0.5 * h * (2.0 * a2.real() + 2.0 * num + norm) / norm;
  const double p2 = 0.5 * h * (2.0 * num + norm - 2.0 * a2.real()) / norm;
  const double qp = h * a2.imag() / norm;
  r.dq2 = q2 - r.q * r.q;
  r.dp2 = p2 - r.p * r.p;
  r.dqp = qp - r.q * r.p;
  return r;
}

ReducedState observables_dense(const FockVector& f) {
  const std::vector<Complex> c = f.coefficients();
  const auto N = static_cast<Eigen::Index>(c.size());
  // One extra level so q̂² and p̂² are exact on the truncated span.
  const Eigen::Index M = N + 1;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(M, M);
  for (Eigen::Index n = 0; n + 1 < M; ++n) a(n, n + 1) = std::sqrt(static_cast<double>(n + 1));
  const double s = std::sqrt(0.5 * f.hbar());
  const Eigen::MatrixXcd ad = a.adjoint();
  const Eigen::MatrixXcd Q = s * (ad + a);
  const Eigen::MatrixXcd P = Complex{0.0, s} * (ad - a);

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(M);
  for (Eigen::Index n = 0; n < N; ++n) psi[n] = c[static_cast<std::size_t>(n)];
  const double norm = psi.squaredNorm();
  const Eigen::VectorXcd qpsi = Q * psi;
  const Eigen::VectorXcd ppsi = P * psi;

  ReducedState r;
  r.t = f.time();
  r.q = psi.dot(qpsi).real() / norm;
  r.p = psi.dot(ppsi).real() / norm;
  const double q2 = qpsi.squaredNorm() / norm;
  const double p2 = ppsi.squaredNorm() / norm;
  // ⟨(qp + pq)/2⟩ = Re⟨qψ, pψ⟩.
  const double qp = qpsi.dot(ppsi).real() / norm;
  r.dq2 = q2 - r.q * r.q;
  r.dp2 = p2 - r.p * r.p;
  r.dqp = qp - r.q * r.p;
  return r;
}

ReducedState free_particle_observables(const ReducedState& initial, double m, double t,
                                       const QuadratureOptions& opts) {
  if (initial.dqp != 0.0) throw DomainError("free-particle oracle needs Δ(qp) = 0");
  if (!(initial.dp2 > 0.0)) throw DomainError("free-particle oracle needs (Δp)² > 0");
  const double m2 = m * m;
  auto v = [m2](double p) { return p / std::sqrt(p * p + m2); };
  const double p0 = initial.p;
  const double ev = gaussian_expectation(v, p0, initial.dp2, opts);
  const double ev2 = gaussian_expectation([&](double p) { return v(p) * v(p); }, p0, initial.dp2, opts);
  const double evp = gaussian_expectation([&](double p) { return v(p) * (p - p0); }, p0, initial.dp2, opts);
  ReducedState r = initial;
  r.t = initial.t + t;
  r.q = initial.q + t * ev;
  r.dq2 = initial.dq2 + t * t * (ev2 - ev * ev);
  r.dqp = t * evp;
  return r;
}

}  // namespace effcon

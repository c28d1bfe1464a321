#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "effcon/moment_algebra.hpp"
#include "effcon/quadrature.hpp"
#include "effcon/reduction.hpp"

namespace effcon {

/// √(2(n+½)ħ + m²): eigenvalues of √(p̂² + q̂² + m²) on Fock states.
double sqrt_eigenvalue(std::size_t n, double hbar, double m);

/// Smallest level count N for which a coherent state keeps less than
/// `tail` probability in the top ten levels, and at least |α|² + 10|α| + 20.
std::size_t coherent_cutoff(double abs_alpha, double tail = 1e-12);

/// Truncated Fock-basis state evolving under √(p̂² + q̂² + m²).
///
/// The t = 0 amplitudes are shared and immutable; evolution only advances the
/// elapsed time, so compositions are exact sums of times.
class FockVector {
 public:
  static FockVector coherent(Complex alpha, double hbar, double m);
  static FockVector coherent(Complex alpha, double hbar, double m, std::size_t levels);
  static FockVector from_coefficients(std::vector<Complex> c, double hbar, double m);

  FockVector evolve(double t) const;

  /// Amplitudes c_n e^{−iλ_n t/ħ} at the current time.
  std::vector<Complex> coefficients() const;
  const std::vector<Complex>& initial_coefficients() const { return *c0_; }

  std::size_t levels() const { return c0_->size(); }
  double hbar() const { return hbar_; }
  double m() const { return m_; }
  double time() const { return time_; }

  double norm() const;
  /// Σ|c_n|² λ_n.
  double energy_expectation() const;

 private:
  FockVector(std::shared_ptr<const std::vector<Complex>> c0, double hbar, double m, double time);

  std::shared_ptr<const std::vector<Complex>> c0_;
  double hbar_ = 1.0;
  double m_ = 0.0;
  double time_ = 0.0;
};

/// q, p and central second moments from ladder-operator matrix elements.
/// The result's t field is the state's elapsed time.
ReducedState observables(const FockVector& f);

/// Same quantities from dense truncated q̂ and p̂ matrices.
ReducedState observables_dense(const FockVector& f);

/// Exact free evolution q̂(t) = q̂ + t p̂/√(p̂² + m²) of a Gaussian state with
/// Δ(qp) = 0, expectations by Gauss–Hermite quadrature.
ReducedState free_particle_observables(const ReducedState& initial, double m, double t,
                                       const QuadratureOptions& opts = {});

}  // namespace effcon

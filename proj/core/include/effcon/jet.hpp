#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "effcon/moment_algebra.hpp"

namespace effcon {

/// First-order forward-mode jet over the 14 phase-space coordinates.
/// Carries a complex value and its gradient; enough to feed
/// bracket_from_gradients with non-polynomial functions such as E.
struct Jet {
  Complex v{};
  Gradient d{};

  Jet() = default;
  Jet(Complex value) : v(value) {}  // NOLINT(google-explicit-constructor)
  Jet(double value) : v(value, 0.0) {}  // NOLINT(google-explicit-constructor)

  static Jet variable(Var x, Complex value) {
    Jet j(value);
    j.d[index(x)] = 1.0;
    return j;
  }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    for (std::size_t k = 0; k < kNumVars; ++k) d[k] += o.d[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    for (std::size_t k = 0; k < kNumVars; ++k) d[k] -= o.d[k];
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    for (std::size_t k = 0; k < kNumVars; ++k) d[k] = d[k] * o.v + v * o.d[k];
    v *= o.v;
    return *this;
  }
  Jet& operator/=(const Jet& o) {
    const Complex inv = 1.0 / o.v;
    for (std::size_t k = 0; k < kNumVars; ++k) d[k] = (d[k] - v * inv * o.d[k]) * inv;
    v *= inv;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const Jet& b) { return a *= b; }
  friend Jet operator/(Jet a, const Jet& b) { return a /= b; }
  friend Jet operator-(Jet a) {
    a.v = -a.v;
    for (auto& g : a.d) g = -g;
    return a;
  }
};

inline Jet sqrt(const Jet& x) {
  Jet r(std::sqrt(x.v));
  const Complex f = 0.5 / r.v;
  for (std::size_t k = 0; k < kNumVars; ++k) r.d[k] = f * x.d[k];
  return r;
}

/// |x| for a jet whose value is real; the derivative takes the sign of Re x.
inline Jet abs_real(const Jet& x) { return x.v.real() < 0.0 ? -x : x; }

/// All 14 coordinates of a state as seeded jets.
inline std::array<Jet, kNumVars> seed(const MomentState& s) {
  std::array<Jet, kNumVars> out;
  for (Var v : kAllVars) out[index(v)] = Jet::variable(v, s[v]);
  return out;
}

}  // namespace effcon

#pragma once

#include <array>
#include <complex>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>

#include "effcon/variables.hpp"

namespace effcon {

using Complex = std::complex<double>;

/// Product of phase-space variables times an explicit power of ħ.
///
/// Exponents are stored in `Var` order with the ħ power last, so the
/// defaulted lexicographic comparison is the canonical term order.
class Monomial {
 public:
  Monomial() = default;
  Monomial(std::initializer_list<Var> factors);

  static Monomial hbar(unsigned power = 1);

  unsigned degree(Var v) const { return exps_[index(v)]; }
  unsigned hbar_power() const { return exps_[kNumVars]; }
  unsigned total_degree() const;
  bool is_constant() const { return total_degree() == 0 && hbar_power() == 0; }

  /// Moment factors count one power of ħ each, explicit ħ factors likewise.
  unsigned hbar_grade() const;

  Monomial& multiply(Var v, unsigned power = 1);
  Monomial& multiply_hbar(unsigned power = 1);
  Monomial& divide(Var v);

  friend Monomial operator*(Monomial a, const Monomial& b);

  friend auto operator<=>(const Monomial&, const Monomial&) = default;
  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::array<std::uint8_t, kNumVars + 1> exps_{};
};

unsigned hbar_grade(const Monomial& m);

/// Polynomial in the 14 phase-space variables and ħ with complex
/// coefficients, kept in canonical form (ordered terms, no zero coefficients).
class PolyExpr {
 public:
  using Terms = std::map<Monomial, Complex>;

  PolyExpr() = default;
  PolyExpr(Complex constant);  // NOLINT(google-explicit-constructor)
  PolyExpr(double constant) : PolyExpr(Complex{constant, 0.0}) {}  // NOLINT
  PolyExpr(int constant) : PolyExpr(Complex{static_cast<double>(constant), 0.0}) {}  // NOLINT
  PolyExpr(Var v);  // NOLINT(google-explicit-constructor)

  static PolyExpr term(Complex coefficient, Monomial monomial);
  static PolyExpr hbar(unsigned power = 1);
  /// Imaginary unit as a coefficient: i·ħ is `PolyExpr::i() * PolyExpr::hbar()`.
  static PolyExpr i() { return PolyExpr(Complex{0.0, 1.0}); }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  Complex coefficient(const Monomial& m) const;

  /// Smallest hbar_grade over the terms; 0 for the zero polynomial.
  unsigned min_hbar_grade() const;

  PolyExpr& operator+=(const PolyExpr& other);
  PolyExpr& operator-=(const PolyExpr& other);
  PolyExpr& operator*=(Complex scalar);

  friend PolyExpr operator+(PolyExpr a, const PolyExpr& b) { return a += b; }
  friend PolyExpr operator-(PolyExpr a, const PolyExpr& b) { return a -= b; }
  friend PolyExpr operator-(PolyExpr a) { return a *= -1.0; }
  friend PolyExpr operator*(const PolyExpr& a, const PolyExpr& b);
  friend PolyExpr operator*(PolyExpr a, Complex s) { return a *= s; }
  friend PolyExpr operator*(Complex s, PolyExpr a) { return a *= s; }
  friend PolyExpr operator*(PolyExpr a, double s) { return a *= Complex{s, 0.0}; }
  friend PolyExpr operator*(double s, PolyExpr a) { return a *= Complex{s, 0.0}; }
  friend PolyExpr operator*(PolyExpr a, int s) { return a *= Complex{double(s), 0.0}; }
  friend PolyExpr operator*(int s, PolyExpr a) { return a *= Complex{double(s), 0.0}; }

  friend bool operator==(const PolyExpr&, const PolyExpr&) = default;

  /// Deterministic text form: terms in canonical order joined by " + ",
  /// each as `(a+bi)*x*y^2*hbar`, coefficients with 17 significant digits.
  /// The zero polynomial renders as `0`.
  std::string render() const;

  /// Inverse of render(); throws std::invalid_argument on malformed input.
  static PolyExpr parse(std::string_view text);

  /// Partial derivative with respect to one phase-space variable.
  PolyExpr derivative(Var v) const;

 private:
  void add_term(const Monomial& m, Complex c);

  Terms terms_;
};

std::string render_coefficient(Complex c);

}  // namespace effcon

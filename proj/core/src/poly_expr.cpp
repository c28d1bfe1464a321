#include "effcon/poly_expr.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace effcon {

Monomial::Monomial(std::initializer_list<Var> factors) {
  for (Var v : factors) multiply(v);
}

Monomial Monomial::hbar(unsigned power) {
  Monomial m;
  m.multiply_hbar(power);
  return m;
}

unsigned Monomial::total_degree() const {
  unsigned d = 0;
  for (std::size_t i = 0; i < kNumVars; ++i) d += exps_[i];
  return d;
}

unsigned Monomial::hbar_grade() const {
  unsigned g = hbar_power();
  for (Var v : kMoments) g += degree(v);
  return g;
}

Monomial& Monomial::multiply(Var v, unsigned power) {
  const unsigned e = exps_[index(v)] + power;
  if (e > std::numeric_limits<std::uint8_t>::max()) {
    throw std::overflow_error("monomial exponent overflow");
  }
  exps_[index(v)] = static_cast<std::uint8_t>(e);
  return *this;
}

Monomial& Monomial::multiply_hbar(unsigned power) {
  const unsigned e = exps_[kNumVars] + power;
  if (e > std::numeric_limits<std::uint8_t>::max()) {
    throw std::overflow_error("monomial exponent overflow");
  }
  exps_[kNumVars] = static_cast<std::uint8_t>(e);
  return *this;
}

Monomial& Monomial::divide(Var v) {
  if (exps_[index(v)] == 0) throw std::logic_error("dividing monomial by absent factor");
  --exps_[index(v)];
  return *this;
}

Monomial operator*(Monomial a, const Monomial& b) {
  for (Var v : kAllVars) {
    if (b.degree(v) != 0) a.multiply(v, b.degree(v));
  }
  if (b.hbar_power() != 0) a.multiply_hbar(b.hbar_power());
  return a;
}

unsigned hbar_grade(const Monomial& m) { return m.hbar_grade(); }

// ---------------------------------------------------------------------------

PolyExpr::PolyExpr(Complex constant) { add_term(Monomial{}, constant); }

PolyExpr::PolyExpr(Var v) { add_term(Monomial{v}, Complex{1.0, 0.0}); }

PolyExpr PolyExpr::term(Complex coefficient, Monomial monomial) {
  PolyExpr e;
  e.add_term(monomial, coefficient);
  return e;
}

PolyExpr PolyExpr::hbar(unsigned power) { return term(Complex{1.0, 0.0}, Monomial::hbar(power)); }

Complex PolyExpr::coefficient(const Monomial& m) const {
  const auto it = terms_.find(m);
  return it == terms_.end() ? Complex{} : it->second;
}

unsigned PolyExpr::min_hbar_grade() const {
  if (terms_.empty()) return 0;
  unsigned g = std::numeric_limits<unsigned>::max();
  for (const auto& [m, c] : terms_) g = std::min(g, m.hbar_grade());
  return g;
}

void PolyExpr::add_term(const Monomial& m, Complex c) {
  if (c == Complex{}) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex{}) terms_.erase(it);
  }
}

PolyExpr& PolyExpr::operator+=(const PolyExpr& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

PolyExpr& PolyExpr::operator-=(const PolyExpr& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

PolyExpr& PolyExpr::operator*=(Complex scalar) {
  if (scalar == Complex{}) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= scalar;
    if (it->second == Complex{}) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

PolyExpr operator*(const PolyExpr& a, const PolyExpr& b) {
  PolyExpr out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  }
  return out;
}

PolyExpr PolyExpr::derivative(Var v) const {
  PolyExpr out;
  for (const auto& [m, c] : terms_) {
    const unsigned e = m.degree(v);
    if (e == 0) continue;
    Monomial reduced = m;
    reduced.divide(v);
    out.add_term(reduced, c * static_cast<double>(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text form

std::string render_coefficient(Complex c) {
  // Adding +0.0 folds negative zero into positive zero.
  const double re = c.real() + 0.0;
  const double im = c.imag() + 0.0;
  return fmt::format("({:.17g}{}{:.17g}i)", re, std::signbit(im) ? "-" : "+", std::abs(im));
}

std::string PolyExpr::render() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) out += " + ";
    first = false;
    out += render_coefficient(c);
    for (Var v : kAllVars) {
      const unsigned e = m.degree(v);
      if (e == 0) continue;
      out += '*';
      out += name(v);
      if (e > 1) out += fmt::format("^{}", e);
    }
    if (m.hbar_power() > 0) {
      out += "*hbar";
      if (m.hbar_power() > 1) out += fmt::format("^{}", m.hbar_power());
    }
  }
  return out;
}

namespace {

double parse_double(std::string_view s) {
  // std::from_chars for double is available in libstdc++ 11.
  double value = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw std::invalid_argument("malformed number '" + std::string(s) + "'");
  }
  return value;
}

unsigned parse_exponent(std::string_view s) {
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || value == 0) {
    throw std::invalid_argument("malformed exponent '" + std::string(s) + "'");
  }
  return value;
}

Complex parse_coefficient(std::string_view s) {
  if (s.size() < 4 || s.front() != '(' || s.back() != ')' || s[s.size() - 2] != 'i') {
    throw std::invalid_argument("malformed coefficient '" + std::string(s) + "'");
  }
  const std::string_view body = s.substr(1, s.size() - 3);
  // Split at the sign that starts the imaginary part: the last '+'/'-' not
  // following an exponent marker and not at position 0.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string_view::npos) {
    throw std::invalid_argument("coefficient lacks imaginary part '" + std::string(s) + "'");
  }
  const double re = parse_double(body.substr(0, split));
  const double im_mag = parse_double(body.substr(split + 1));
  return {re, body[split] == '-' ? -im_mag : im_mag};
}

}  // namespace

PolyExpr PolyExpr::parse(std::string_view text) {
  PolyExpr out;
  if (text == "0") return out;
  constexpr std::string_view sep = " + ";
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find(sep, pos);
    const std::string_view piece =
        text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    // piece: (a+bi)[*factor[^k]]...
    const std::size_t close = piece.find(')');
    if (close == std::string_view::npos) {
      throw std::invalid_argument("malformed term '" + std::string(piece) + "'");
    }
    const Complex c = parse_coefficient(piece.substr(0, close + 1));
    Monomial m;
    std::string_view rest = piece.substr(close + 1);
    while (!rest.empty()) {
      if (rest.front() != '*') {
        throw std::invalid_argument("expected '*' in term '" + std::string(piece) + "'");
      }
      rest.remove_prefix(1);
      const std::size_t end = std::min(rest.find('*'), rest.size());
      std::string_view factor = rest.substr(0, end);
      rest.remove_prefix(end);
      unsigned power = 1;
      if (const auto caret = factor.find('^'); caret != std::string_view::npos) {
        power = parse_exponent(factor.substr(caret + 1));
        factor = factor.substr(0, caret);
      }
      if (factor == "hbar") {
        m.multiply_hbar(power);
      } else if (const auto v = parse_var(factor)) {
        m.multiply(*v, power);
      } else {
        throw std::invalid_argument("unknown factor '" + std::string(factor) + "'");
      }
    }
    out.add_term(m, c);
    if (next == std::string_view::npos) break;
    pos = next + sep.size();
  }
  return out;
}

}  // namespace effcon

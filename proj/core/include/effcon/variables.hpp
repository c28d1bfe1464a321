#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

namespace effcon {

/// Coordinates of the second-order quantum phase space of two canonical
/// pairs (t, p_t) and (q, p): four expectation values followed by the ten
/// second-order moments. The enumerator order is the canonical monomial order.
enum class Var : std::uint8_t {
  t,
  pt,
  q,
  p,
  Dt2,   // (Δt)²
  Dtpt,  // Δ(t p_t)
  Dpt2,  // (Δp_t)²
  Dq2,   // (Δq)²
  Dqp,   // Δ(q p)
  Dp2,   // (Δp)²
  Dtq,   // Δ(t q)
  Dptp,  // Δ(p_t p)
  Dtp,   // Δ(t p)
  Dptq,  // Δ(p_t q)
};

inline constexpr std::size_t kNumVars = 14;
inline constexpr std::size_t kNumBasic = 4;
inline constexpr std::size_t kNumMoments = 10;

constexpr std::size_t index(Var v) { return static_cast<std::size_t>(v); }
constexpr Var var_at(std::size_t i) { return static_cast<Var>(i); }
constexpr bool is_moment(Var v) { return index(v) >= kNumBasic; }

inline constexpr std::array<Var, kNumVars> kAllVars = {
    Var::t,   Var::pt,   Var::q,    Var::p,   Var::Dt2, Var::Dtpt, Var::Dpt2,
    Var::Dq2, Var::Dqp,  Var::Dp2,  Var::Dtq, Var::Dptp, Var::Dtp, Var::Dptq};

inline constexpr std::array<Var, kNumMoments> kMoments = {
    Var::Dt2, Var::Dtpt, Var::Dpt2, Var::Dq2, Var::Dqp,
    Var::Dp2, Var::Dtq,  Var::Dptp, Var::Dtp, Var::Dptq};

/// Identifier used in text renderings and CSV headers.
std::string_view name(Var v);
std::optional<Var> parse_var(std::string_view text);

/// The two basic operators whose fluctuations a moment correlates.
std::pair<Var, Var> moment_factors(Var moment);

/// Moment Δ(ab) for basic variables a, b (order irrelevant).
Var moment_of(Var a, Var b);

}  // namespace effcon

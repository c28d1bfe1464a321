#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace effcon {

/// One measured check: `id` is the criterion number with an optional
/// sub-letter ("7a"), `value` the measured quantity, `bound` its limit.
struct CriterionResult {
  std::string id;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string detail;
};

enum class Suite { brackets, closure, dirac, limits, appB };

std::optional<Suite> parse_suite(std::string_view name);
std::string_view suite_name(Suite s);
inline constexpr Suite kAllSuites[] = {Suite::brackets, Suite::closure, Suite::dirac, Suite::limits, Suite::appB};

std::vector<CriterionResult> run_suite(Suite suite);

/// Tab-separated `id value bound PASS|FAIL detail`.
std::string format_result(const CriterionResult& r);

/// Oracle Δp(2q₀)/Δp(0) for the α = 10/√2, ħ = 1, m = 0 scenario, pinned
/// from the first oracle run.
inline constexpr double kPinnedDpRatio = 1.8162308784157892;

}  // namespace effcon

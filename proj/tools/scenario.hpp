#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "effcon/dynamics.hpp"
#include "effcon/errors.hpp"
#include "effcon/models.hpp"
#include "effcon/reduction.hpp"

namespace effcon::scenario {

/// Bad scenario document. `line` is 1-based and 0 when unknown; `field` is a
/// JSON pointer ("/integrator/step") or empty for syntax errors.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, std::size_t line, const std::string& message);

  const std::string& field() const { return field_; }
  std::size_t line() const { return line_; }
  /// The message without the location prefix.
  const std::string& message() const { return message_; }

 private:
  std::string field_;
  std::string message_;
  std::size_t line_;
};

enum class Engine { classical, effective, oracle };

std::string_view engine_name(Engine e);

struct ScenarioConfig {
  std::string name = "scenario";
  ModelSpec model = QuadraticPotential{0.0};
  double hbar = 1.0;
  /// Initial expectation values and moments; `t` is ignored.
  ReducedState initial;
  /// Set when the document gave a coherent state; the oracle then starts
  /// from exactly this α.
  std::optional<Complex> alpha;
  Branch sign = Branch::plus;
  std::pair<double, double> t_span{0.0, 1.0};
  IntegratorOptions integrator;
  /// File-name prefix, relative to the output directory.
  std::string output = "scenario";
  std::vector<Engine> engines{Engine::effective};
  /// Relative Δp mismatch that counts as the effective and oracle moments
  /// having diverged.
  double divergence_tolerance = 0.1;

  bool has(Engine e) const;
};

/// Parses and validates one JSON scenario document.
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Applies `pointer=json-value` overrides to a document before parsing,
/// e.g. "/hbar=2" or "/engines=[\"effective\"]".
std::string apply_overrides(std::string_view text, const std::vector<std::string>& overrides);

struct EngineReport {
  Engine engine = Engine::effective;
  bool ok = false;
  std::string error;
  std::filesystem::path csv;
  std::size_t samples = 0;
};

struct ScenarioResult {
  std::vector<EngineReport> engines;
  std::filesystem::path summary;
  std::filesystem::path plot_script;
  /// Only when both the effective and oracle engines succeeded.
  std::optional<std::filesystem::path> dp_csv;

  bool ok() const;
};

/// Runs the requested engines concurrently and writes one CSV per engine,
/// `<output>_summary.json` and `<output>_plot.py` under `out_dir`.
/// Engine failures are recorded, not thrown.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

/// Sample times shared by the classical and oracle engines: every
/// `step·sample_every` from t0, plus t1.
std::vector<double> sample_times(const ScenarioConfig& cfg);

}  // namespace effcon::scenario

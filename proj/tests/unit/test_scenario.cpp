#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "effcon/csv.hpp"
#include "scenario.hpp"

using namespace effcon;
using namespace effcon::scenario;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("effcon-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ConfigError config_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a ConfigError");
  return ConfigError("", 0, "");
}

const char* kMinimal = R"({
  "model": {"type": "quadratic", "m": 0.0},
  "initial": {"coherent": {"q": 3.0}},
  "t_span": [0, 2],
  "engines": ["classical", "effective", "oracle"],
  "integrator": {"step": 0.01, "sample_every": 5},
  "output": "mini"
})";

}  // namespace

TEST_CASE("minimal document") {
  const ScenarioConfig cfg = parse_scenario(kMinimal);
  CHECK(cfg.hbar == 1.0);
  CHECK(cfg.sign == Branch::plus);
  REQUIRE(cfg.alpha.has_value());
  CHECK(cfg.alpha->real() == doctest::Approx(3.0 / std::sqrt(2.0)));
  CHECK(cfg.initial.q == doctest::Approx(3.0));
  CHECK(cfg.initial.dq2 == 0.5);
  CHECK(cfg.integrator.sample_every == 5);
  CHECK(cfg.has(Engine::oracle));
  CHECK(sample_times(cfg).size() == 41);
}

TEST_CASE("shipped presets parse") {
  for (const char* name : {"figure1", "figure2", "massless-demo", "timedep-slow"}) {
    INFO(name);
    const ScenarioConfig cfg = load_scenario(fs::path(EFFCON_PRESET_DIR) / (std::string(name) + ".json"));
    CHECK(cfg.name == name);
  }
  const ScenarioConfig f1 = load_scenario(fs::path(EFFCON_PRESET_DIR) / "figure1.json");
  CHECK(f1.alpha->real() == doctest::Approx(10.0 / std::sqrt(2.0)));
  CHECK(f1.t_span.second == 50.0);
  CHECK(f1.engines.size() == 3);
}

TEST_CASE("config errors carry the field and line") {
  SUBCASE("syntax") {
    const ConfigError e = config_error("{\n  \"hbar\": 1,\n  \"t_span\": [0, 1],,\n}");
    CHECK(e.line() == 3);
    CHECK(e.field().empty());
  }
  SUBCASE("bad value") {
    const ConfigError e = config_error(
        "{\n  \"model\": {\"type\": \"quadratic\", \"m\": 0},\n  \"initial\": {\"coherent\": {\"q\": 1}},\n"
        "  \"t_span\": [0, 1],\n  \"integrator\": {\n    \"step\": -0.1\n  }\n}");
    CHECK(e.field() == "/integrator/step");
    CHECK(e.line() == 6);
  }
  SUBCASE("unknown field") {
    const ConfigError e = config_error(
        "{\n  \"model\": {\"type\": \"quadratic\", \"m\": 0},\n  \"hbar\": 1,\n  \"hbr\": 1\n}");
    CHECK(e.field() == "/hbr");
    CHECK(e.line() == 4);
  }
  SUBCASE("array element") {
    const ConfigError e = config_error(
        "{\n  \"model\": {\"type\": \"quadratic\", \"m\": 0},\n  \"initial\": {\"coherent\": {\"q\": 1}},\n"
        "  \"t_span\": [0, 1],\n  \"engines\": [\n    \"effective\",\n    \"quantum\"\n  ]\n}");
    CHECK(e.field() == "/engines/1");
    CHECK(e.line() == 7);
  }
  SUBCASE("missing model") {
    CHECK(config_error(R"({"t_span": [0, 1]})").field() == "/model");
  }
  SUBCASE("degenerate time span") {
    CHECK(config_error(R"({"model": {"type": "massless"}, "initial": {"q": 0, "p": 1, "dq2": 1, "dp2": 1},
                           "t_span": [1, 1]})")
              .field() == "/t_span");
  }
  SUBCASE("inadmissible initial state") {
    CHECK(config_error(R"({"model": {"type": "free", "m": 1}, "initial": {"q": 0, "p": 1, "dq2": 0.1, "dp2": 0.1},
                           "t_span": [0, 1]})")
              .field() == "/initial");
  }
  SUBCASE("oracle needs a supported model") {
    CHECK(config_error(R"({"model": {"type": "massless"}, "initial": {"q": 0, "p": 1, "dq2": 1, "dp2": 1},
                           "t_span": [0, 1], "engines": ["oracle"]})")
              .field() == "/engines/0");
  }
  SUBCASE("oracle needs a coherent state for the quadratic model") {
    CHECK(config_error(R"({"model": {"type": "quadratic", "m": 0}, "initial": {"q": 0, "p": 1, "dq2": 1, "dp2": 1},
                           "t_span": [0, 1], "engines": ["oracle"]})")
              .field() == "/initial");
  }
  SUBCASE("classical engine needs a static model") {
    CHECK(config_error(R"({"model": {"type": "linear_time", "m": 1, "lambda": 0.1},
                           "initial": {"q": 0, "p": 1, "dq2": 1, "dp2": 1},
                           "t_span": [0, 1], "engines": ["classical"]})")
              .field() == "/engines/0");
  }
}

TEST_CASE("overrides") {
  const ScenarioConfig cfg = parse_scenario(apply_overrides(kMinimal, {"/hbar=2", "/engines=[\"effective\"]"}));
  CHECK(cfg.hbar == 2.0);
  CHECK(cfg.engines == std::vector<Engine>{Engine::effective});
  CHECK_THROWS_AS(apply_overrides(kMinimal, {"hbar=2"}), ConfigError);
}

TEST_CASE("run produces comparable CSVs and a summary") {
  const fs::path dir = scratch("run");
  const ScenarioConfig cfg = parse_scenario(kMinimal);
  const ScenarioResult res = run_scenario(cfg, dir);
  REQUIRE(res.ok());
  REQUIRE(res.engines.size() == 3);
  for (const EngineReport& r : res.engines) {
    CHECK(r.samples == 41);
    CHECK(slurp(r.csv).rfind("t,q,p,dq2,dqp,dp2,E,flags\n", 0) == 0);
  }
  REQUIRE(res.dp_csv.has_value());
  CHECK(fs::exists(*res.dp_csv));
  CHECK(fs::exists(res.plot_script));
  const std::string summary = slurp(res.summary);
  CHECK(summary.find("\"max_q_deviation\"") != std::string::npos);
  CHECK(summary.find("\"casimir_drift\"") != std::string::npos);

  SUBCASE("identical configs give byte-identical files") {
    const fs::path other = scratch("run-again");
    const ScenarioResult again = run_scenario(cfg, other);
    for (std::size_t i = 0; i < res.engines.size(); ++i) {
      CHECK(slurp(res.engines[i].csv) == slurp(again.engines[i].csv));
    }
    CHECK(slurp(res.summary) == slurp(again.summary));
  }
}

TEST_CASE("classical engine traces a circle") {
  const fs::path dir = scratch("circle");
  ScenarioConfig cfg = parse_scenario(R"({"model": {"type": "quadratic", "m": 0.5},
      "initial": {"q": 3, "p": 4, "dq2": 1, "dp2": 1}, "t_span": [0, 40], "engines": ["classical"],
      "integrator": {"step": 0.1}, "output": "circle"})");
  const ScenarioResult res = run_scenario(cfg, dir);
  REQUIRE(res.ok());
  std::ifstream in(res.engines[0].csv);
  const auto samples = read_trajectory_csv(in);
  for (const Sample& s : samples) CHECK(std::hypot(s.state.q, s.state.p) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("engine failures are recorded, not thrown") {
  const fs::path dir = scratch("fail");
  const ScenarioConfig cfg = parse_scenario(R"({"model": {"type": "massless"},
      "initial": {"q": 0, "p": 0, "dq2": 1, "dp2": 1}, "t_span": [0, 1], "engines": ["classical", "effective"],
      "output": "broken"})");
  const ScenarioResult res = run_scenario(cfg, dir);
  CHECK_FALSE(res.ok());
  for (const EngineReport& r : res.engines) {
    CHECK_FALSE(r.ok);
    CHECK_FALSE(r.error.empty());
  }
  CHECK(fs::exists(res.summary));
}

TEST_CASE("minus branch mirrors time") {
  const fs::path dir = scratch("mirror");
  ScenarioConfig cfg = parse_scenario(kMinimal);
  cfg.engines = {Engine::effective, Engine::oracle};
  cfg.sign = Branch::minus;
  cfg.output = "minus";
  const ScenarioResult res = run_scenario(cfg, dir);
  REQUIRE(res.ok());
  std::ifstream eff(res.engines[0].csv), orc(res.engines[1].csv);
  const auto a = read_trajectory_csv(eff), b = read_trajectory_csv(orc);
  CHECK(a.back().state.p > 0.0);  // the plus branch turns clockwise
  CHECK(std::abs(a.back().state.q - b.back().state.q) < 1e-2);
  CHECK(std::abs(a.back().state.p - b.back().state.p) < 1e-2);
}

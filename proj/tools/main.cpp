#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "effcon/verify.hpp"
#include "scenario.hpp"

namespace fs = std::filesystem;
using namespace effcon;
using namespace effcon::scenario;

namespace {

enum Exit : int { kOk = 0, kConfig = 1, kEngine = 2, kVerify = 3 };

std::vector<fs::path> preset_dirs() {
  std::vector<fs::path> dirs;
  if (const char* env = std::getenv("EFFCON_PRESET_DIR")) dirs.emplace_back(env);
  dirs.emplace_back(EFFCON_SOURCE_PRESET_DIR);
  dirs.emplace_back(EFFCON_INSTALLED_PRESET_DIR);
  return dirs;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const fs::path& dir : preset_dirs()) {
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
    }
    if (!names.empty()) break;
  }
  std::sort(names.begin(), names.end());
  return names;
}

fs::path find_preset(const std::string& name) {
  for (const fs::path& dir : preset_dirs()) {
    const fs::path p = dir / (name + ".json");
    if (fs::exists(p)) return p;
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("", 0, fmt::format("unknown preset '{}' (available: {})", name, known));
}

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("EFFCON_OUTPUT_DIR"); env && *env) return env;
  return fs::current_path();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, fmt::format("cannot open {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_file(const fs::path& path, const std::vector<std::string>& overrides, const std::string& out_flag) {
  ScenarioConfig cfg;
  try {
    cfg = parse_scenario(apply_overrides(slurp(path), overrides));
  } catch (const ConfigError& e) {
    // Lines refer to the re-serialized document once overrides are applied.
    const std::string where = overrides.empty() || e.line() == 0 ? std::string(e.what())
                              : e.field().empty()                ? e.message()
                                                                 : e.field() + ": " + e.message();
    std::cerr << fmt::format("config error in {}: {}\n", path.string(), where);
    return kConfig;
  }
  const fs::path dir = output_dir(out_flag);
  ScenarioResult result;
  try {
    result = run_scenario(cfg, dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kEngine;
  }
  for (const EngineReport& r : result.engines) {
    if (r.ok) {
      std::cout << fmt::format("{:<10} ok     {} samples -> {}\n", engine_name(r.engine), r.samples, r.csv.string());
    } else {
      std::cout << fmt::format("{:<10} FAILED {}\n", engine_name(r.engine), r.error);
    }
  }
  if (result.dp_csv) std::cout << fmt::format("{:<10} {}\n", "dp", result.dp_csv->string());
  std::cout << fmt::format("{:<10} {}\n{:<10} {}\n", "summary", result.summary.string(), "plot", result.plot_script.string());
  return result.ok() ? kOk : kEngine;
}

int run_verify(const std::string& which) {
  std::vector<Suite> suites;
  if (which == "all") {
    suites.assign(std::begin(kAllSuites), std::end(kAllSuites));
  } else if (auto s = parse_suite(which)) {
    suites.push_back(*s);
  } else {
    std::cerr << fmt::format("unknown suite '{}' (brackets, closure, dirac, limits, appB, all)\n", which);
    return kConfig;
  }
  bool ok = true;
  for (Suite s : suites) {
    for (const CriterionResult& r : run_suite(s)) {
      std::cout << format_result(r) << '\n';
      ok = ok && r.pass;
    }
  }
  return ok ? kOk : kVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective constraint dynamics: scenarios, figure presets and acceptance checks"};
  app.require_subcommand(1);

  std::string out_flag;
  std::vector<std::string> overrides;

  auto* run = app.add_subcommand("run", "Run a JSON scenario file");
  std::string config;
  run->add_option("config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out-dir", out_flag, "Output directory (default $EFFCON_OUTPUT_DIR, then the working directory)");
  run->add_option("-s,--set", overrides, "Override a field: /json/pointer=value");

  auto* preset = app.add_subcommand("preset", "Run a shipped scenario");
  std::string preset_name;
  bool list = false;
  preset->add_option("name", preset_name, "figure1, figure2, massless-demo, timedep-slow");
  preset->add_flag("-l,--list", list, "List available presets");
  preset->add_option("-o,--out-dir", out_flag, "Output directory (default $EFFCON_OUTPUT_DIR, then the working directory)");
  preset->add_option("-s,--set", overrides, "Override a field: /json/pointer=value");

  auto* verify = app.add_subcommand("verify", "Run an acceptance suite; one line per criterion");
  std::string suite;
  verify->add_option("suite", suite, "brackets, closure, dirac, limits, appB or all")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return run_file(config, overrides, out_flag);
    if (*preset) {
      if (list) {
        for (const auto& n : preset_names()) std::cout << n << '\n';
        return kOk;
      }
      if (preset_name.empty()) {
        std::cerr << "preset: a name or --list is required\n";
        return kConfig;
      }
      return run_file(find_preset(preset_name), overrides, out_flag);
    }
    if (*verify) return run_verify(suite);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kEngine;
  }
  return kOk;
}

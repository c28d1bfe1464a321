#include "scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <iterator>
#include <map>
#include <sstream>

#include "json.hpp"

#include "effcon/csv.hpp"
#include "effcon/oracle.hpp"
#include "effcon/quadrature.hpp"

namespace effcon::scenario {

using nlohmann::json;

ConfigError::ConfigError(std::string field, std::size_t line, const std::string& message)
    : Error(line > 0 ? fmt::format("line {}: {}{}", line, field.empty() ? "" : field + ": ", message)
                     : fmt::format("{}{}", field.empty() ? "" : field + ": ", message)),
      field_(std::move(field)),
      message_(message),
      line_(line) {}

std::string_view engine_name(Engine e) {
  switch (e) {
    case Engine::classical: return "classical";
    case Engine::effective: return "effective";
    case Engine::oracle: return "oracle";
  }
  return "?";
}

bool ScenarioConfig::has(Engine e) const { return std::find(engines.begin(), engines.end(), e) != engines.end(); }

bool ScenarioResult::ok() const {
  return std::all_of(engines.begin(), engines.end(), [](const EngineReport& r) { return r.ok; });
}

namespace {

// ---------------------------------------------------------------------------
// Source lines for JSON pointers.

// Counts newlines as the lexer consumes characters. Keys are reported right
// after their closing quote, so the count is exact for them.
struct CountingIterator {
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* at = nullptr;
  std::size_t* newlines = nullptr;

  reference operator*() const { return *at; }
  CountingIterator& operator++() {
    if (*at == '\n') ++*newlines;
    ++at;
    return *this;
  }
  CountingIterator operator++(int) {
    CountingIterator old = *this;
    ++*this;
    return old;
  }
  bool operator==(const CountingIterator& o) const { return at == o.at; }
  bool operator!=(const CountingIterator& o) const { return at != o.at; }
};

std::string escape_pointer_token(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

class LineRecorder : public nlohmann::json_sax<json> {
 public:
  explicit LineRecorder(const std::size_t* newlines) : newlines_(newlines) {}

  std::map<std::string, std::size_t> lines;

  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }
  bool start_object(std::size_t) override {
    open();
    stack_.push_back({false, {}, 0});
    return true;
  }
  bool key(string_t& k) override {
    stack_.back().key = escape_pointer_token(k);
    lines[pointer()] = *newlines_ + 1;
    return true;
  }
  bool end_object() override {
    stack_.pop_back();
    return true;
  }
  bool start_array(std::size_t) override {
    open();
    stack_.push_back({true, {}, 0});
    return true;
  }
  bool end_array() override {
    stack_.pop_back();
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override { return false; }

 private:
  struct Frame {
    bool array;
    std::string key;
    std::size_t index;
  };

  std::string pointer() const {
    std::string out;
    for (const Frame& f : stack_) out += "/" + (f.array ? std::to_string(f.index) : f.key);
    return out;
  }

  void open() {
    if (!stack_.empty() && stack_.back().array) {
      lines[pointer()] = *newlines_ + 1;
      ++stack_.back().index;
    }
  }
  bool value() {
    open();
    return true;
  }

  const std::size_t* newlines_;
  std::vector<Frame> stack_;
};

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

json parse_document(std::string_view text, std::map<std::string, std::size_t>& lines) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    std::string what = e.what();
    if (const auto pos = what.find(": "); pos != std::string::npos) what = what.substr(pos + 2);
    throw ConfigError("", line_of_offset(text, offset), "invalid JSON: " + what);
  }
  std::size_t newlines = 0;
  LineRecorder rec(&newlines);
  json::sax_parse(CountingIterator{text.data(), &newlines}, CountingIterator{text.data() + text.size(), &newlines},
                  &rec);
  lines = std::move(rec.lines);
  return doc;
}

// ---------------------------------------------------------------------------
// Typed field access.

class Reader {
 public:
  explicit Reader(const std::map<std::string, std::size_t>& lines) : lines_(lines) {}

  [[noreturn]] void fail(const std::string& ptr, const std::string& message) const {
    throw ConfigError(ptr.empty() ? "/" : ptr, line(ptr), message);
  }

  std::size_t line(std::string ptr) const {
    while (!ptr.empty()) {
      if (auto it = lines_.find(ptr); it != lines_.end()) return it->second;
      ptr.erase(ptr.rfind('/'));
    }
    return 0;
  }

  void only(const json& obj, const std::string& ptr, std::initializer_list<std::string_view> allowed) const {
    if (!obj.is_object()) fail(ptr, "expected an object");
    for (const auto& [k, v] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        fail(ptr + "/" + escape_pointer_token(k), "unknown field");
      }
    }
  }

  double number(const json& v, const std::string& ptr) const {
    if (!v.is_number()) fail(ptr, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(ptr, "must be finite");
    return x;
  }

  double number(const json& obj, const std::string& ptr, const char* key, std::optional<double> fallback) const {
    if (!obj.contains(key)) {
      if (!fallback) fail(ptr + "/" + key, "missing required field");
      return *fallback;
    }
    return number(obj.at(key), ptr + "/" + key);
  }

  double positive(const json& obj, const std::string& ptr, const char* key, std::optional<double> fallback) const {
    const double x = number(obj, ptr, key, fallback);
    if (!(x > 0.0)) fail(ptr + "/" + key, "must be positive");
    return x;
  }

  std::string string(const json& obj, const std::string& ptr, const char* key,
                     std::optional<std::string> fallback) const {
    if (!obj.contains(key)) {
      if (!fallback) fail(ptr + "/" + key, "missing required field");
      return *fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_string()) fail(ptr + "/" + key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& v, const std::string& ptr) const {
    if (!v.is_array()) fail(ptr, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], ptr + "/" + std::to_string(i)));
    return out;
  }

 private:
  const std::map<std::string, std::size_t>& lines_;
};

ModelSpec read_model(const Reader& rd, const json& doc) {
  if (!doc.contains("model")) rd.fail("/model", "missing required field");
  const json& m = doc.at("model");
  const std::string ptr = "/model";
  if (!m.is_object()) rd.fail(ptr, "expected an object");
  const std::string type = rd.string(m, ptr, "type", std::nullopt);
  ModelSpec model;
  if (type == "free") {
    rd.only(m, ptr, {"type", "m"});
    model = FreeMassive{rd.number(m, ptr, "m", std::nullopt)};
  } else if (type == "massless") {
    rd.only(m, ptr, {"type"});
    model = Massless{};
  } else if (type == "quadratic") {
    rd.only(m, ptr, {"type", "m"});
    model = QuadraticPotential{rd.number(m, ptr, "m", std::nullopt)};
  } else if (type == "linear_time") {
    rd.only(m, ptr, {"type", "m", "lambda"});
    model = LinearTimePotential{rd.number(m, ptr, "m", std::nullopt), rd.number(m, ptr, "lambda", std::nullopt)};
  } else if (type == "slow_polynomial") {
    rd.only(m, ptr, {"type", "m", "lambda", "v0", "vtilde"});
    SlowPolynomialPotential s;
    s.m = rd.number(m, ptr, "m", std::nullopt);
    s.lambda = rd.number(m, ptr, "lambda", std::nullopt);
    s.v0 = rd.number(m, ptr, "v0", 0.0);
    if (m.contains("vtilde")) s.vtilde = rd.numbers(m.at("vtilde"), ptr + "/vtilde");
    model = s;
  } else {
    rd.fail(ptr + "/type", fmt::format("unknown model '{}' (free, massless, quadratic, linear_time, slow_polynomial)", type));
  }
  try {
    validate(model);
  } catch (const DomainError& e) {
    rd.fail(ptr, e.what());
  }
  return model;
}

void read_initial(const Reader& rd, const json& doc, ScenarioConfig& cfg) {
  if (!doc.contains("initial")) rd.fail("/initial", "missing required field");
  const json& in = doc.at("initial");
  const std::string ptr = "/initial";
  if (!in.is_object()) rd.fail(ptr, "expected an object");
  const double s = std::sqrt(2.0 * cfg.hbar);
  if (in.contains("coherent")) {
    rd.only(in, ptr, {"coherent"});
    const json& c = in.at("coherent");
    rd.only(c, ptr + "/coherent", {"q", "p"});
    const double q = rd.number(c, ptr + "/coherent", "q", std::nullopt);
    const double p = rd.number(c, ptr + "/coherent", "p", 0.0);
    cfg.alpha = Complex(q / s, p / s);
  } else if (in.contains("alpha")) {
    rd.only(in, ptr, {"alpha"});
    const std::vector<double> a = rd.numbers(in.at("alpha"), ptr + "/alpha");
    if (a.size() != 2) rd.fail(ptr + "/alpha", "expected [re, im]");
    cfg.alpha = Complex(a[0], a[1]);
  } else {
    rd.only(in, ptr, {"q", "p", "dq2", "dqp", "dp2"});
    cfg.initial.q = rd.number(in, ptr, "q", std::nullopt);
    cfg.initial.p = rd.number(in, ptr, "p", std::nullopt);
    cfg.initial.dq2 = rd.number(in, ptr, "dq2", std::nullopt);
    cfg.initial.dqp = rd.number(in, ptr, "dqp", 0.0);
    cfg.initial.dp2 = rd.number(in, ptr, "dp2", std::nullopt);
    return;
  }
  cfg.initial.q = s * cfg.alpha->real();
  cfg.initial.p = s * cfg.alpha->imag();
  cfg.initial.dq2 = 0.5 * cfg.hbar;
  cfg.initial.dqp = 0.0;
  cfg.initial.dp2 = 0.5 * cfg.hbar;
}

IntegratorOptions read_integrator(const Reader& rd, const json& doc) {
  IntegratorOptions o;
  if (!doc.contains("integrator")) return o;
  const json& in = doc.at("integrator");
  const std::string ptr = "/integrator";
  rd.only(in, ptr,
          {"method", "step", "rtol", "atol", "breakdown", "moment_bound", "admissibility_tolerance", "sample_every"});
  const std::string method = rd.string(in, ptr, "method", "fixed_rk4");
  if (method == "fixed_rk4") o.method = Method::fixed_rk4;
  else if (method == "adaptive_rk45") o.method = Method::adaptive_rk45;
  else rd.fail(ptr + "/method", "expected fixed_rk4 or adaptive_rk45");
  o.step = rd.positive(in, ptr, "step", o.step);
  o.rtol = rd.positive(in, ptr, "rtol", o.rtol);
  o.atol = rd.positive(in, ptr, "atol", o.atol);
  const std::string breakdown = rd.string(in, ptr, "breakdown", "flag_and_continue");
  if (breakdown == "stop") o.breakdown = BreakdownPolicy::stop;
  else if (breakdown == "flag_and_continue") o.breakdown = BreakdownPolicy::flag_and_continue;
  else rd.fail(ptr + "/breakdown", "expected stop or flag_and_continue");
  o.moment_bound = rd.positive(in, ptr, "moment_bound", o.moment_bound);
  o.admissibility_tolerance = rd.positive(in, ptr, "admissibility_tolerance", o.admissibility_tolerance);
  if (in.contains("sample_every")) {
    const json& v = in.at("sample_every");
    if (!v.is_number_integer() || v.get<long long>() < 1) rd.fail(ptr + "/sample_every", "expected an integer ≥ 1");
    o.sample_every = v.get<std::size_t>();
  }
  return o;
}

std::vector<Engine> read_engines(const Reader& rd, const json& doc) {
  if (!doc.contains("engines")) return {Engine::effective};
  const json& v = doc.at("engines");
  if (!v.is_array() || v.empty()) rd.fail("/engines", "expected a non-empty array");
  std::vector<Engine> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string ptr = "/engines/" + std::to_string(i);
    if (!v[i].is_string()) rd.fail(ptr, "expected an engine name");
    const std::string name = v[i].get<std::string>();
    Engine e;
    if (name == "classical") e = Engine::classical;
    else if (name == "effective") e = Engine::effective;
    else if (name == "oracle") e = Engine::oracle;
    else rd.fail(ptr, fmt::format("unknown engine '{}' (classical, effective, oracle)", name));
    if (std::find(out.begin(), out.end(), e) != out.end()) rd.fail(ptr, "duplicate engine");
    out.push_back(e);
  }
  return out;
}

void check_engines(const Reader& rd, const json& doc, const ScenarioConfig& cfg) {
  for (std::size_t i = 0; i < cfg.engines.size(); ++i) {
    const std::string ptr = "/engines/" + std::to_string(i);
    if (cfg.engines[i] == Engine::classical && is_time_dependent(cfg.model)) {
      rd.fail(ptr, "the classical engine needs a time-independent model");
    }
    if (cfg.engines[i] != Engine::oracle) continue;
    const std::string init = doc.at("initial").contains("coherent") || doc.at("initial").contains("alpha") ? "/initial"
                                                                                                           : "/initial/dqp";
    if (std::holds_alternative<QuadraticPotential>(cfg.model)) {
      const ReducedState& r = cfg.initial;
      const double tol = 1e-12 * cfg.hbar;
      if (std::abs(r.dq2 - 0.5 * cfg.hbar) > tol || std::abs(r.dp2 - 0.5 * cfg.hbar) > tol ||
          std::abs(r.dqp) > tol) {
        rd.fail("/initial", "the oracle engine needs a coherent initial state (dq2 = dp2 = hbar/2, dqp = 0)");
      }
    } else if (std::holds_alternative<FreeMassive>(cfg.model)) {
      if (cfg.initial.dqp != 0.0) rd.fail(init, "the free-particle oracle needs dqp = 0");
    } else {
      rd.fail(ptr, "the oracle engine supports only the quadratic and free models");
    }
  }
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text) {
  std::map<std::string, std::size_t> lines;
  const json doc = parse_document(text, lines);
  const Reader rd(lines);
  rd.only(doc, "", {"name", "model", "hbar", "initial", "sign", "t_span", "integrator", "output", "engines",
                    "divergence_tolerance"});

  ScenarioConfig cfg;
  cfg.name = rd.string(doc, "", "name", cfg.name);
  cfg.model = read_model(rd, doc);
  cfg.hbar = rd.positive(doc, "", "hbar", 1.0);
  read_initial(rd, doc, cfg);

  const std::string sign = rd.string(doc, "", "sign", "+");
  if (sign == "+") cfg.sign = Branch::plus;
  else if (sign == "-") cfg.sign = Branch::minus;
  else rd.fail("/sign", "expected \"+\" or \"-\"");

  if (!doc.contains("t_span")) rd.fail("/t_span", "missing required field");
  const std::vector<double> span = rd.numbers(doc.at("t_span"), "/t_span");
  if (span.size() != 2) rd.fail("/t_span", "expected [t0, t1]");
  if (!(span[1] > span[0])) rd.fail("/t_span", "t1 must exceed t0");
  cfg.t_span = {span[0], span[1]};
  cfg.initial.t = span[0];

  cfg.integrator = read_integrator(rd, doc);
  cfg.output = rd.string(doc, "", "output", cfg.name);
  if (cfg.output.empty() || std::filesystem::path(cfg.output).is_absolute()) {
    rd.fail("/output", "expected a non-empty relative path prefix");
  }
  cfg.engines = read_engines(rd, doc);
  cfg.divergence_tolerance = rd.positive(doc, "", "divergence_tolerance", cfg.divergence_tolerance);

  const AlgebraContext ctx(cfg.hbar);
  if (const Admissibility adm = check_admissible(cfg.initial, ctx, cfg.integrator.admissibility_tolerance);
      !adm.ok()) {
    rd.fail("/initial", "not a physical state: " + adm.message());
  }
  check_engines(rd, doc, cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, fmt::format("cannot open {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(e.field(), e.line(), fmt::format("{}: {}", path.string(), e.message()));
  }
}

std::string apply_overrides(std::string_view text, const std::vector<std::string>& overrides) {
  if (overrides.empty()) return std::string(text);
  std::map<std::string, std::size_t> lines;
  json doc = parse_document(text, lines);
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || o.empty() || o[0] != '/') {
      throw ConfigError("", 0, fmt::format("override '{}' is not of the form /pointer=value", o));
    }
    const std::string ptr = o.substr(0, eq);
    json value;
    try {
      value = json::parse(o.substr(eq + 1));
    } catch (const json::parse_error&) {
      value = o.substr(eq + 1);
    }
    try {
      doc[json::json_pointer(ptr)] = value;
    } catch (const json::exception& e) {
      throw ConfigError(ptr, 0, fmt::format("cannot override: {}", e.what()));
    }
  }
  return doc.dump(2);
}

std::vector<double> sample_times(const ScenarioConfig& cfg) {
  const auto [t0, t1] = cfg.t_span;
  const double dt = cfg.integrator.method == Method::fixed_rk4
                        ? cfg.integrator.step * static_cast<double>(cfg.integrator.sample_every)
                        : cfg.integrator.step;
  std::vector<double> out{t0};
  for (std::size_t k = 1;; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    if (t >= t1 - 1e-9 * dt) break;
    out.push_back(t);
  }
  out.push_back(t1);
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Engines.

struct EngineRun {
  EngineReport report;
  std::vector<Sample> samples;
};

using Evaluator = std::function<Sample(double)>;

// Elapsed physical time for the branch: the minus branch runs backwards.
double elapsed(const ScenarioConfig& cfg, double t) { return -sigma(cfg.sign) * (t - cfg.t_span.first); }

Evaluator classical_evaluator(const ScenarioConfig& cfg) {
  const ReducedState r0 = cfg.initial;
  const ModelSpec model = cfg.model;
  if (const auto* quad = std::get_if<QuadraticPotential>(&model)) {
    const QuadraticPotential qm = *quad;
    return [cfg, qm, r0, model](double t) {
      const auto qp = classical_trajectory(qm, r0.p, r0.q, {elapsed(cfg, t)}).front();
      Sample s;
      s.time = t;
      s.state = {t, qp.first, qp.second, 0.0, 0.0, 0.0};
      s.E = energy(model, s.state);
      return s;
    };
  }
  ReducedState point{r0.t, r0.q, r0.p, 0.0, 0.0, 0.0};
  const double E = energy(model, point);
  if (!(E > 0.0)) throw DomainError("classical velocity is undefined for a massless particle at rest");
  const double velocity = r0.p / E;
  return [cfg, r0, E, velocity](double t) {
    Sample s;
    s.time = t;
    s.state = {t, r0.q + velocity * elapsed(cfg, t), r0.p, 0.0, 0.0, 0.0};
    s.E = E;
    return s;
  };
}

Evaluator oracle_evaluator(const ScenarioConfig& cfg) {
  if (const auto* quad = std::get_if<QuadraticPotential>(&cfg.model)) {
    const Complex alpha = cfg.alpha.value_or(
        Complex(cfg.initial.q, cfg.initial.p) / std::sqrt(2.0 * cfg.hbar));
    const FockVector psi = FockVector::coherent(alpha, cfg.hbar, quad->m);
    const double E = psi.energy_expectation();
    return [cfg, psi, E](double t) {
      Sample s;
      s.time = t;
      s.state = observables(psi.evolve(elapsed(cfg, t)));
      s.state.t = t;
      s.E = E;
      return s;
    };
  }
  const double m = std::get<FreeMassive>(cfg.model).m;
  const double E = sqrt_mass_shell_expectation(cfg.initial.p, cfg.initial.dp2, m);
  return [cfg, m, E](double t) {
    Sample s;
    s.time = t;
    s.state = free_particle_observables(cfg.initial, m, elapsed(cfg, t));
    s.state.t = t;
    s.E = E;
    return s;
  };
}

std::filesystem::path engine_path(const ScenarioConfig& cfg, const std::filesystem::path& dir, std::string_view what) {
  return dir / fmt::format("{}_{}.csv", cfg.output, what);
}

void write_csv(const std::filesystem::path& path, const std::vector<Sample>& samples) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  write_trajectory_csv(out, samples);
}

EngineRun run_engine(const ScenarioConfig& cfg, Engine engine, const std::filesystem::path& dir,
                     Trajectory* effective_out) {
  EngineRun run;
  run.report.engine = engine;
  try {
    if (engine == Engine::effective) {
      Trajectory traj = integrate(cfg.model, cfg.initial, cfg.t_span, AlgebraContext(cfg.hbar), cfg.integrator,
                                  cfg.sign);
      run.samples = traj.samples;
      *effective_out = std::move(traj);
    } else {
      const Evaluator eval = engine == Engine::classical ? classical_evaluator(cfg) : oracle_evaluator(cfg);
      for (double t : sample_times(cfg)) run.samples.push_back(eval(t));
    }
    run.report.csv = engine_path(cfg, dir, engine_name(engine));
    write_csv(run.report.csv, run.samples);
    run.report.samples = run.samples.size();
    run.report.ok = true;
  } catch (const std::exception& e) {
    run.report.ok = false;
    run.report.error = e.what();
  }
  return run;
}

json state_json(const ReducedState& r) {
  return {{"t", r.t}, {"q", r.q}, {"p", r.p}, {"dq2", r.dq2}, {"dqp", r.dqp}, {"dp2", r.dp2}};
}

json engine_summary(const EngineRun& run) {
  json j = {{"ok", run.report.ok}};
  if (!run.report.ok) {
    j["error"] = run.report.error;
    return j;
  }
  j["csv"] = run.report.csv.filename().string();
  j["samples"] = run.report.samples;
  const Sample& first = run.samples.front();
  const Sample& last = run.samples.back();
  j["final"] = state_json(last.state);
  double drift = 0.0;
  for (const Sample& s : run.samples) {
    drift = std::max(drift, std::abs(s.E - first.E) / std::max(std::abs(first.E), 1e-300));
  }
  j["E_drift"] = drift;
  return j;
}

std::string plot_script(const ScenarioConfig& cfg, const ScenarioResult& result) {
  std::string files;
  for (const EngineReport& r : result.engines) {
    if (r.ok) files += fmt::format("    \"{}\": \"{}\",\n", engine_name(r.engine), r.csv.filename().string());
  }
  return fmt::format(R"(# Plot stub for scenario '{0}'. Needs pandas and matplotlib.
import os
import sys

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

here = os.path.dirname(os.path.abspath(__file__))
runs = {{
{1}}}

fig, (ax_qp, ax_dp) = plt.subplots(1, 2, figsize=(11, 4.5))
for name, path in runs.items():
    df = pd.read_csv(os.path.join(here, path))
    ax_qp.plot(df.q, df.p, label=name)
    if name != "classical":
        ax_dp.plot(df.t, np.sqrt(df.dp2), label=name)
ax_qp.set_xlabel("q")
ax_qp.set_ylabel("p")
ax_qp.set_aspect("equal", adjustable="datalim")
ax_qp.legend()
ax_dp.set_xlabel("t")
ax_dp.set_ylabel("dp")
ax_dp.legend()
fig.tight_layout()
out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "{2}.png")
fig.savefig(out, dpi=150)
)",
                     cfg.name, files, std::filesystem::path(cfg.output).filename().string());
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
  const std::filesystem::path prefix = out_dir / cfg.output;
  std::filesystem::create_directories(prefix.parent_path());

  Trajectory effective;
  std::vector<std::future<EngineRun>> jobs;
  for (Engine e : cfg.engines) {
    jobs.push_back(std::async(std::launch::async, run_engine, std::cref(cfg), e, std::cref(out_dir), &effective));
  }
  std::vector<EngineRun> runs;
  for (auto& j : jobs) runs.push_back(j.get());

  ScenarioResult result;
  json summary = {{"scenario", cfg.name},
                  {"model", model_name(cfg.model)},
                  {"hbar", cfg.hbar},
                  {"sign", cfg.sign == Branch::plus ? "+" : "-"},
                  {"t_span", {cfg.t_span.first, cfg.t_span.second}},
                  {"initial", state_json(cfg.initial)}};
  json engines = json::object();
  const EngineRun* eff = nullptr;
  const EngineRun* orc = nullptr;
  for (const EngineRun& run : runs) {
    result.engines.push_back(run.report);
    json j = engine_summary(run);
    if (run.report.engine == Engine::effective && run.report.ok) {
      eff = &run;
      const ReducedState& r0 = run.samples.front().state;
      const double c0 = r0.dq2 * r0.dp2 - r0.dqp * r0.dqp;
      double casimir = 0.0;
      std::size_t inadmissible = 0, bound = 0;
      for (const Sample& s : run.samples) {
        const ReducedState& r = s.state;
        casimir = std::max(casimir, std::abs(r.dq2 * r.dp2 - r.dqp * r.dqp - c0) / c0);
        inadmissible += (s.flags & kInadmissible) != 0;
        bound += (s.flags & kMomentBound) != 0;
      }
      j["casimir_drift"] = casimir;
      j["inadmissible_samples"] = inadmissible;
      j["moment_bound_samples"] = bound;
      j["breakdown_time"] =
          effective.breakdown_index ? json(effective.samples[*effective.breakdown_index].time) : json(nullptr);
    }
    if (run.report.engine == Engine::oracle && run.report.ok) orc = &run;
    engines[std::string(engine_name(run.report.engine))] = std::move(j);
  }
  summary["engines"] = std::move(engines);

  if (eff && orc) {
    const Evaluator oracle = oracle_evaluator(cfg);
    double dq = 0.0, dqp = 0.0;
    std::optional<double> diverged;
    result.dp_csv = engine_path(cfg, out_dir, "dp");
    std::ofstream dp(*result.dp_csv);
    dp << "t,dp_effective,dp_oracle\n";
    for (const Sample& s : eff->samples) {
      const ReducedState o = oracle(s.time).state;
      dq = std::max(dq, std::abs(s.state.q - o.q));
      dqp = std::max(dqp, std::hypot(s.state.q - o.q, s.state.p - o.p));
      const double de = std::sqrt(s.state.dp2), doo = std::sqrt(o.dp2);
      if (!diverged && std::abs(de - doo) > cfg.divergence_tolerance * doo) diverged = s.time;
      dp << fmt::format("{:.17g},{:.17g},{:.17g}\n", s.time, de, doo);
    }
    summary["comparison"] = {{"max_q_deviation", dq},
                             {"max_qp_deviation", dqp},
                             {"divergence_tolerance", cfg.divergence_tolerance},
                             {"moment_divergence_time", diverged ? json(*diverged) : json(nullptr)},
                             {"dp_csv", result.dp_csv->filename().string()}};
  }

  result.summary = out_dir / (cfg.output + "_summary.json");
  std::ofstream(result.summary) << summary.dump(2) << '\n';
  result.plot_script = out_dir / (cfg.output + "_plot.py");
  std::ofstream(result.plot_script) << plot_script(cfg, result);
  return result;
}

}  // namespace effcon::scenario

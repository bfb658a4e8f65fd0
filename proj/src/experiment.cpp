#include "abq/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "abq/checkpoint.hpp"

namespace abq {

ConfigError::ConfigError(const std::string& source, int line, const std::string& key,
                         const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                         (key.empty() ? std::string() : ": " + key) + ": " + message),
      line_(line),
      key_(key) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Ctx {
  const std::string& source;
  int line;
  const std::string& key;

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(source, line, key, msg); }
};

double to_double(const std::string& v, const Ctx& c) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    c.fail("expected a finite number, got '" + v + "'");
  }
  return out;
}

template <class Int>
Int to_int(const std::string& v, const Ctx& c) {
  Int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    c.fail("expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& v, const Ctx& c) {
  if (v == "true") return true;
  if (v == "false") return false;
  c.fail("expected true or false, got '" + v + "'");
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value,
                      const std::string& source, int line) {
  const Ctx c{source, line, key};
  if (key == "grid.nx") {
    cfg.grid.nx = to_int<int>(value, c);
  } else if (key == "grid.ny") {
    cfg.grid.ny = to_int<int>(value, c);
  } else if (key == "grid.ly") {
    cfg.grid.ly = to_double(value, c);
  } else if (key == "params.nu") {
    cfg.params.nu = to_double(value, c);
  } else if (key == "params.eta") {
    cfg.params.eta = to_double(value, c);
  } else if (key == "params.g0") {
    cfg.params.g0 = to_double(value, c);
  } else if (key == "solver.dt") {
    cfg.solver.dt = to_double(value, c);
  } else if (key == "solver.t_end") {
    cfg.solver.t_end = to_double(value, c);
  } else if (key == "solver.scheme") {
    try {
      cfg.solver.scheme = scheme_from_string(value);
    } catch (const std::invalid_argument& e) {
      c.fail(e.what());
    }
  } else if (key == "solver.cfl_safety") {
    cfg.solver.cfl_safety = to_double(value, c);
  } else if (key == "solver.linearized_only") {
    cfg.solver.linearized_only = to_bool(value, c);
  } else if (key == "solver.check_cfl") {
    cfg.solver.check_cfl = to_bool(value, c);
  } else if (key == "ic.kind") {
    cfg.ic.kind = value;
  } else if (key == "ic.epsilon") {
    cfg.ic.epsilon = to_double(value, c);
  } else if (key == "ic.seed") {
    cfg.ic.seed = to_int<std::uint64_t>(value, c);
  } else if (key == "ic.k0") {
    cfg.ic.k0 = to_double(value, c);
  } else if (key == "ic.mode_j") {
    cfg.ic.mode_j = to_int<int>(value, c);
  } else if (key == "ic.mode_m") {
    cfg.ic.mode_m = to_int<int>(value, c);
  } else if (key == "ic.checkpoint") {
    cfg.ic.checkpoint = value;
  } else if (key == "observe.cadence") {
    cfg.observe.cadence = to_double(value, c);
  } else if (key == "observe.delta") {
    if (value == "auto") {
      cfg.observe.delta.reset();
    } else {
      cfg.observe.delta = to_double(value, c);
    }
  } else if (key == "observe.csv") {
    cfg.observe.csv = value;
  } else if (key == "observe.certificate") {
    cfg.observe.certificate = value;
  } else if (key == "observe.checkpoint") {
    cfg.observe.checkpoint = value;
  } else {
    c.fail("unknown key");
  }
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig cfg;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "", "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError(source, line, "", "missing key");
    set_config_value(cfg, key, value, source, line);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "", "cannot open config file");
  return parse_config(in, path.string());
}

std::vector<std::string> config_lines(const RunConfig& cfg) {
  return {
      "grid.nx = " + std::to_string(cfg.grid.nx),
      "grid.ny = " + std::to_string(cfg.grid.ny),
      "grid.ly = " + fmt(cfg.grid.ly),
      "params.nu = " + fmt(cfg.params.nu),
      "params.eta = " + fmt(cfg.params.eta),
      "params.g0 = " + fmt(cfg.params.g0),
      "solver.dt = " + fmt(cfg.solver.dt),
      "solver.t_end = " + fmt(cfg.solver.t_end),
      "solver.scheme = " + to_string(cfg.solver.scheme),
      "solver.cfl_safety = " + fmt(cfg.solver.cfl_safety),
      std::string("solver.linearized_only = ") + (cfg.solver.linearized_only ? "true" : "false"),
      std::string("solver.check_cfl = ") + (cfg.solver.check_cfl ? "true" : "false"),
      "ic.kind = " + cfg.ic.kind,
      "ic.epsilon = " + fmt(cfg.ic.epsilon),
      "ic.seed = " + std::to_string(cfg.ic.seed),
      "ic.k0 = " + fmt(cfg.ic.k0),
      "ic.mode_j = " + std::to_string(cfg.ic.mode_j),
      "ic.mode_m = " + std::to_string(cfg.ic.mode_m),
      "ic.checkpoint = " + cfg.ic.checkpoint,
      "observe.cadence = " + fmt(cfg.observe.cadence),
      "observe.delta = " + (cfg.observe.delta ? fmt(*cfg.observe.delta) : std::string("auto")),
      "observe.csv = " + cfg.observe.csv,
      "observe.certificate = " + cfg.observe.certificate,
      "observe.checkpoint = " + cfg.observe.checkpoint,
  };
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& l : config_lines(cfg)) out += l + "\n";
  return out;
}

namespace {

bool is_multiple(double span, double dt) {
  const double r = span / dt;
  return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
}

}  // namespace

void RunConfig::validate() const {
  const std::string src = "config";
  try {
    Grid g(grid.nx, grid.ny, grid.ly);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(src, 0, "grid", e.what());
  }
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(src, 0, "params", e.what());
  }
  try {
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(src, 0, "solver", e.what());
  }
  if (ic.kind != "random_banded" && ic.kind != "single_mode" && ic.kind != "from_checkpoint") {
    throw ConfigError(src, 0, "ic.kind",
                      "expected random_banded, single_mode or from_checkpoint, got '" + ic.kind +
                          "'");
  }
  if (ic.kind != "from_checkpoint" && !(ic.epsilon > 0.0)) {
    throw ConfigError(src, 0, "ic.epsilon", "must be > 0");
  }
  if (ic.kind == "random_banded" && !(ic.k0 > 0.0)) {
    throw ConfigError(src, 0, "ic.k0", "must be > 0");
  }
  if (ic.kind == "from_checkpoint" && ic.checkpoint.empty()) {
    throw ConfigError(src, 0, "ic.checkpoint", "required for from_checkpoint");
  }
  if (!(observe.cadence > 0.0) || !is_multiple(observe.cadence, solver.dt)) {
    throw ConfigError(src, 0, "observe.cadence", "must be a positive multiple of solver.dt");
  }
  if (observe.delta && !(*observe.delta >= 0.0)) {
    throw ConfigError(src, 0, "observe.delta", "must be >= 0");
  }
  if (observe.csv.empty()) throw ConfigError(src, 0, "observe.csv", "must not be empty");
}

State make_initial_state(const RunConfig& cfg) {
  const Grid grid(cfg.grid.nx, cfg.grid.ny, cfg.grid.ly);
  if (cfg.ic.kind == "random_banded") {
    return random_banded_state(grid, cfg.ic.epsilon, cfg.ic.seed, cfg.ic.k0);
  }
  if (cfg.ic.kind == "single_mode") {
    try {
      return single_mode_state(grid, cfg.ic.mode_j, cfg.ic.mode_m, cfg.ic.epsilon);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("config", 0, "ic.mode_j", e.what());
    }
  }
  Checkpoint cp = [&] {
    try {
      return read_checkpoint(cfg.ic.checkpoint);
    } catch (const std::exception& e) {
      throw ConfigError("config", 0, "ic.checkpoint", e.what());
    }
  }();
  if (!(cp.state.grid() == grid)) {
    throw ConfigError("config", 0, "ic.checkpoint", "checkpoint grid differs from grid.*");
  }
  return std::move(cp.state);
}

std::filesystem::path default_output_root() {
  const char* env = std::getenv(kOutputRootEnv);
  return env != nullptr && *env != '\0' ? std::filesystem::path(env) : std::filesystem::path("out");
}

namespace {

void write_certificate_report(std::ostream& out, const RunOutcome& o) {
  out << "quantity = osc_h1^2\n";
  out << "delta = " << format_double(o.delta) << "\n";
  out << "final_E = " << format_double(o.final_energy) << "\n";
  if (o.fit) {
    out << "fit_window = [" << format_double(kFitWindowStart) << ", "
        << format_double(kFitWindowEnd) << "]\n";
    out << "alpha = " << format_double(o.fit->alpha) << "\n";
    out << "amplitude = " << format_double(o.fit->amplitude) << "\n";
  } else {
    out << "alpha = n/a\n";
  }
  if (o.certificate) {
    const auto& c = *o.certificate;
    out << "C0 = " << format_double(c.c0) << "\n";
    out << "C1 = " << format_double(c.c1) << "\n";
    out << "C2 = " << format_double(c.c2) << "\n";
    out << "integrable = " << (c.integrable ? "yes" : "no") << "\n";
    out << "tail_exponent = " << format_double(c.tail_exponent) << "\n";
    out << "tail_tf_nonincreasing = " << (c.tail_tf_decreasing ? "yes" : "no") << "\n";
    out << "verdict = " << (c.verdict ? "PASS" : "FAIL") << "\n";
    if (!c.reason.empty()) out << "reason = " << c.reason << "\n";
  } else {
    out << "verdict = n/a\n";
  }
  if (o.boundary_warning) out << "warning = field mass near the vertical truncation boundary\n";
}

}  // namespace

RunOutcome run(const RunConfig& cfg_in, const std::filesystem::path& out_dir) {
  RunOutcome o;
  RunConfig cfg = cfg_in;
  State ic(Grid(8, 8));
  try {
    cfg.validate();
    ic = make_initial_state(cfg);
  } catch (const ConfigError& e) {
    o.exit_code = kExitConfigError;
    o.message = e.what();
    return o;
  }
  if (!(cfg.solver.t_end >= ic.t) || !is_multiple(cfg.solver.t_end - ic.t, cfg.solver.dt)) {
    o.exit_code = kExitConfigError;
    o.message = "config: solver.t_end: t_end - t0 must be a nonnegative multiple of solver.dt";
    return o;
  }

  std::filesystem::create_directories(out_dir);
  o.delta = cfg.observe.delta ? *cfg.observe.delta : default_delta(cfg.params, record(ic, cfg.params));
  cfg.observe.delta = o.delta;

  SimulationResult sim = simulate(ic, cfg.params, cfg.solver, cfg.observe.cadence, o.delta);
  o.failure = sim.failure;
  o.max_divergence = sim.max_divergence;
  o.boundary_warning = sim.boundary_warning;
  o.final_energy = energy_functional(sim.series).back();

  if (!cfg.observe.checkpoint.empty()) {
    o.checkpoint_path = out_dir / cfg.observe.checkpoint;
    write_checkpoint(o.checkpoint_path.string(), sim.final_state, cfg.params);
  }

  o.csv_path = out_dir / cfg.observe.csv;
  {
    std::ostringstream body;
    try {
      write_series_csv(body, sim.series, config_lines(cfg));
    } catch (const DeltaTooLarge& e) {
      o.exit_code = kExitInvariantViolation;
      o.message = e.what();
    }
    std::ofstream csv(o.csv_path, std::ios::binary | std::ios::trunc);
    csv << body.str();
  }

  const auto t = sim.series.times();
  const auto f = sim.series.oscillation_energy();
  if (t.size() >= 2) {
    try {
      o.certificate = certify_decay(t, f);
    } catch (const std::invalid_argument&) {
    }
  }
  try {
    o.fit = fit_decay_exponent(t, f, kFitWindowStart, kFitWindowEnd);
  } catch (const std::invalid_argument&) {
  }

  if (!cfg.observe.certificate.empty()) {
    o.certificate_path = out_dir / cfg.observe.certificate;
    std::ofstream rep(o.certificate_path, std::ios::trunc);
    for (const auto& l : config_lines(cfg)) rep << "# " << l << "\n";
    write_certificate_report(rep, o);
  }

  if (sim.failure) {
    o.exit_code = kExitBlowup;
    o.message = "numerical blowup at t = " + format_double(sim.failure->time) +
                "; last finite state in " + o.checkpoint_path.string();
  } else if (o.exit_code == kExitOk) {
    if (sim.max_divergence > 1e-12) {
      o.exit_code = kExitInvariantViolation;
      o.message = "divergence " + format_double(sim.max_divergence) + " exceeds 1e-12";
    } else if (sim.max_average_u2 != 0.0) {
      o.exit_code = kExitInvariantViolation;
      o.message = "horizontal average of u2 is nonzero";
    }
  }
  o.final_state = std::move(sim.final_state);
  return o;
}

const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> axes{"nu", "eta", "g0", "epsilon", "dt", "nx"};
  return axes;
}

namespace {

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

double relative_distance(const State& a, const State& b) {
  double num = 0.0;
  double den = 0.0;
  const SpectralField* fa[] = {&a.u1, &a.u2, &a.theta};
  const SpectralField* fb[] = {&b.u1, &b.u2, &b.theta};
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < fa[c]->coeffs().size(); ++i) {
      num += std::norm((*fa[c])[i] - (*fb[c])[i]);
      den += std::norm((*fb[c])[i]);
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

SweepOutcome sweep(const RunConfig& base, const std::string& axis,
                   const std::vector<std::string>& values, const std::filesystem::path& out_dir,
                   int workers) {
  static const std::map<std::string, std::string> keys{
      {"nu", "params.nu"}, {"eta", "params.eta"}, {"g0", "params.g0"},
      {"epsilon", "ic.epsilon"}, {"dt", "solver.dt"}, {"nx", "grid.nx"}};
  const auto key = keys.find(axis);
  if (key == keys.end()) throw ConfigError("sweep", 0, axis, "unknown sweep axis");
  if (values.empty()) throw ConfigError("sweep", 0, axis, "no values given");

  std::filesystem::create_directories(out_dir);
  SweepOutcome out;
  out.rows.resize(values.size());
  std::vector<std::optional<State>> finals(values.size());

  auto child = [&](std::size_t i) {
    SweepRow& row = out.rows[i];
    row.value = values[i];
    RunConfig cfg = base;
    try {
      set_config_value(cfg, key->second, values[i], "sweep", 0);
      if (axis == "nx") cfg.grid.ny = base.grid.ny * cfg.grid.nx / base.grid.nx;
    } catch (const ConfigError& e) {
      row.exit_code = kExitConfigError;
      row.message = e.what();
      return;
    }
    try {
      RunOutcome o = run(cfg, out_dir / (axis + "=" + values[i]));
      row.exit_code = o.exit_code;
      row.message = o.message;
      row.final_energy = o.final_energy;
      if (o.fit) row.alpha = o.fit->alpha;
      if (o.certificate) row.verdict = o.certificate->verdict;
      finals[i] = std::move(o.final_state);
    } catch (const std::exception& e) {
      row.exit_code = kExitInvariantViolation;
      row.message = e.what();
    }
  };

  const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(values.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < values.size(); i = next++) child(i);
    });
  }
  for (auto& th : pool) th.join();

  const auto& ref = finals.back();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (ref && finals[i] && finals[i]->grid() == ref->grid()) {
      out.rows[i].diff_vs_last = relative_distance(*finals[i], *ref);
    }
  }

  out.summary_path = out_dir / "summary.csv";
  std::ofstream s(out.summary_path, std::ios::trunc);
  s << "# sweep.axis = " << axis << "\n";
  for (const auto& l : config_lines(base)) s << "# " << l << "\n";
  s << "value,exit_code,final_E,alpha,certificate,diff_vs_last,message\n";
  for (const auto& r : out.rows) {
    s << r.value << "," << r.exit_code << "," << format_double(r.final_energy) << ","
      << (r.alpha ? format_double(*r.alpha) : "") << ","
      << (r.verdict ? (*r.verdict ? "PASS" : "FAIL") : "") << ","
      << (r.diff_vs_last ? format_double(*r.diff_vs_last) : "") << "," << sanitize(r.message)
      << "\n";
  }
  return out;
}

InequalityOutcome verify_inequalities(std::size_t trials, std::uint64_t seed,
                                      const std::vector<int>& resolutions) {
  InequalityOutcome out;
  for (int res : resolutions) {
    auto reps = run_inequality_suite(trials, seed, res);
    out.reports.insert(out.reports.end(), reps.begin(), reps.end());
  }
  std::map<std::string, std::pair<double, double>> range;
  std::vector<std::string> order;
  for (const auto& r : out.reports) {
    if (r.explicit_constant) {
      if (r.violations > 0) out.exit_code = kExitInvariantViolation;
      continue;
    }
    auto [it, fresh] = range.try_emplace(r.lemma, r.empirical_constant, r.empirical_constant);
    if (fresh) order.push_back(r.lemma);
    it->second.first = std::min(it->second.first, r.empirical_constant);
    it->second.second = std::max(it->second.second, r.empirical_constant);
  }
  for (const auto& name : order) {
    const auto [lo, hi] = range[name];
    out.constant_spread.emplace_back(name, lo > 0.0 ? hi / lo : 0.0);
  }
  return out;
}

InequalityConfig parse_inequality_config(std::istream& in, const std::string& source) {
  InequalityConfig cfg;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "", "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const Ctx c{source, line, key};
    if (key == "lab.trials") {
      cfg.trials = to_int<std::size_t>(value, c);
      if (cfg.trials < 1) c.fail("must be >= 1");
    } else if (key == "lab.seed") {
      cfg.seed = to_int<std::uint64_t>(value, c);
    } else if (key == "lab.resolutions") {
      cfg.resolutions.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const int r = to_int<int>(trim(item), c);
        if (r < 8) c.fail("resolutions must be >= 8");
        cfg.resolutions.push_back(r);
      }
      if (cfg.resolutions.empty()) c.fail("no resolutions given");
    } else {
      c.fail("unknown key");
    }
  }
  return cfg;
}

InequalityConfig load_inequality_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "", "cannot open config file");
  return parse_inequality_config(in, path.string());
}

void write_inequality_report(std::ostream& out, const InequalityOutcome& o) {
  for (const auto& r : o.reports) out << format_report(r) << "\n";
  for (const auto& [name, spread] : o.constant_spread) {
    out << "lemma=" << name << " constant_spread=" << format_double(spread) << "\n";
  }
}

int certify_decay_cli(const std::string& path, const std::string& column, std::ostream& out) {
  const bool square = column.size() > 2 && column.ends_with("^2");
  const std::string name = square ? column.substr(0, column.size() - 2) : column;
  CsvColumn col = read_csv_column(path, name);
  if (square) {
    for (double& v : col.values) v *= v;
  }
  const DecayCertificate c = certify_decay(col.t, col.values);
  out << "series = " << path << "\n";
  out << "column = " << column << "\n";
  out << "samples = " << col.t.size() << "\n";
  out << "C0 = " << format_double(c.c0) << "\n";
  out << "C1 = " << format_double(c.c1) << "\n";
  out << "C2 = " << format_double(c.c2) << "\n";
  out << "integrable = " << (c.integrable ? "yes" : "no") << "\n";
  out << "tail_exponent = " << format_double(c.tail_exponent) << "\n";
  out << "tail_tf_nonincreasing = " << (c.tail_tf_decreasing ? "yes" : "no") << "\n";
  out << "worst_violation_t = "
      << (c.worst_violation_t ? format_double(*c.worst_violation_t) : std::string("none")) << "\n";
  out << "verdict = " << (c.verdict ? "PASS" : "FAIL") << "\n";
  if (!c.reason.empty()) out << "reason = " << c.reason << "\n";
  return c.verdict ? kExitOk : kExitCertificateFailure;
}

RunOutcome resume(const std::filesystem::path& checkpoint, double t_end,
                  const std::filesystem::path& out_dir, double dt, double cadence, Scheme scheme) {
  Checkpoint cp = read_checkpoint(checkpoint.string());
  RunConfig cfg;
  cfg.grid = {cp.state.grid().nx(), cp.state.grid().ny(), cp.state.grid().ly()};
  cfg.params = cp.params;
  cfg.solver.dt = dt;
  cfg.solver.t_end = t_end;
  cfg.solver.scheme = scheme;
  cfg.ic.kind = "from_checkpoint";
  cfg.ic.checkpoint = checkpoint.string();
  cfg.observe.cadence = cadence;
  return run(cfg, out_dir);
}

}  // namespace abq

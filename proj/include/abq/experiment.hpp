// Run configuration, single runs, parameter sweeps and the batch entry
// points behind the command-line tool.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "abq/diagnostics.hpp"
#include "abq/initial_conditions.hpp"
#include "abq/inequality_lab.hpp"
#include "abq/solver.hpp"

namespace abq {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitBlowup = 3,
  kExitInvariantViolation = 4,
  kExitCertificateFailure = 5,
};

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "BOUSSINESQ_OUT";

struct GridConfig {
  int nx = 64;
  int ny = 256;
  double ly = Grid::kDefaultLy;
  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct IcConfig {
  std::string kind = "random_banded";  // random_banded | single_mode | from_checkpoint
  double epsilon = 1e-2;
  std::uint64_t seed = 1;
  double k0 = kDefaultK0;
  int mode_j = 1;
  int mode_m = 1;
  std::string checkpoint;
  friend bool operator==(const IcConfig&, const IcConfig&) = default;
};

struct ObserveConfig {
  double cadence = 0.1;
  /// Empty: chosen by default_delta from the initial record.
  std::optional<double> delta;
  std::string csv = "series.csv";
  std::string certificate = "certificate.txt";
  /// Final (or last finite) state; empty disables it.
  std::string checkpoint = "final.abq";
  friend bool operator==(const ObserveConfig&, const ObserveConfig&) = default;
};

struct RunConfig {
  GridConfig grid;
  Params params;
  SolverConfig solver;
  IcConfig ic;
  ObserveConfig observe;

  /// Throws ConfigError describing the first invalid key.
  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& key,
              const std::string& message);
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Sets one dotted key from its textual value. Throws ConfigError.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value,
                      const std::string& source = "<config>", int line = 0);

/// Flat "key = value" text; '#' starts a comment.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// One "key = value" line per field, in a fixed order; parse_config
/// reproduces the config exactly (doubles in shortest round-trip form).
std::vector<std::string> config_lines(const RunConfig& cfg);
std::string serialize_config(const RunConfig& cfg);

/// Initial state described by cfg.ic on cfg.grid.
State make_initial_state(const RunConfig& cfg);

/// $BOUSSINESQ_OUT if set, otherwise "out".
std::filesystem::path default_output_root();

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;
  std::filesystem::path csv_path;
  std::filesystem::path certificate_path;
  std::filesystem::path checkpoint_path;
  double delta = 0.0;
  double final_energy = 0.0;
  std::optional<PowerLawFit> fit;
  std::optional<DecayCertificate> certificate;
  std::optional<Failure> failure;
  double max_divergence = 0.0;
  bool boundary_warning = false;
  std::optional<State> final_state;
};

/// Window over which the osc_h1^2 decay exponent is fitted.
inline constexpr double kFitWindowStart = 5.0;
inline constexpr double kFitWindowEnd = 50.0;

/// Simulates, writes the series CSV, the decay report and the checkpoint
/// into out_dir. Exit code reflects blowup or invariant violations.
RunOutcome run(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Sweepable axes: nu, eta, g0, epsilon, dt, nx.
const std::vector<std::string>& sweep_axes();

struct SweepRow {
  std::string value;
  int exit_code = kExitOk;
  std::string message;
  double final_energy = 0.0;
  std::optional<double> alpha;
  std::optional<bool> verdict;
  /// Relative L2 distance of the final state to that of the last value
  /// (same grid only).
  std::optional<double> diff_vs_last;
};

struct SweepOutcome {
  std::vector<SweepRow> rows;
  std::filesystem::path summary_path;
};

/// Independent child runs in out_dir/<axis>=<value>/, at most `workers`
/// at a time, then a summary.csv. Child failures are recorded, not fatal.
SweepOutcome sweep(const RunConfig& base, const std::string& axis,
                   const std::vector<std::string>& values, const std::filesystem::path& out_dir,
                   int workers = 1);

struct InequalityOutcome {
  std::vector<TrialReport> reports;
  /// max/min ratio of each generic empirical constant across resolutions.
  std::vector<std::pair<std::string, double>> constant_spread;
  int exit_code = kExitOk;
};

InequalityOutcome verify_inequalities(std::size_t trials, std::uint64_t seed,
                                      const std::vector<int>& resolutions);

struct InequalityConfig {
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  std::vector<int> resolutions{64, 128};
  friend bool operator==(const InequalityConfig&, const InequalityConfig&) = default;
};

/// Keys lab.trials, lab.seed and lab.resolutions (comma-separated), in the
/// run-config syntax. Throws ConfigError.
InequalityConfig parse_inequality_config(std::istream& in, const std::string& source = "<config>");
InequalityConfig load_inequality_config(const std::filesystem::path& path);
void write_inequality_report(std::ostream& out, const InequalityOutcome& outcome);

/// Certifies a series column; "name^2" squares the named column. Prints the
/// certificate and returns kExitOk or kExitCertificateFailure. Throws
/// std::runtime_error / std::invalid_argument for unreadable input.
int certify_decay_cli(const std::string& path, const std::string& column, std::ostream& out);

/// Continues a checkpoint to t_end with the given step and cadence.
RunOutcome resume(const std::filesystem::path& checkpoint, double t_end,
                  const std::filesystem::path& out_dir, double dt = 1e-3, double cadence = 0.1,
                  Scheme scheme = Scheme::kStrang2);

}  // namespace abq

// Diagnostics for the perturbation system: norms and energy functional,
// Lyapunov functional with cross term, wave-structure and averaged-system
// residuals, power-law fits and the integrable/monotone decay certificate.
#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abq/field_algebra.hpp"

namespace abq {

struct EnergyRecord {
  double t = 0.0;
  double l2_u = 0.0;
  double l2_theta = 0.0;
  double h1_u = 0.0;
  double h1_theta = 0.0;
  double h2_u = 0.0;
  double h2_theta = 0.0;
  double d2u_h2 = 0.0;      // ||d2 u||_{H^2}
  double d1theta_h2 = 0.0;  // ||d1 theta||_{H^2}
  double d1u2_l2 = 0.0;     // ||d1 u2||_{L^2}
  double osc_h1 = 0.0;      // ||(u~, theta~)||_{H^1}
  double avg_h1 = 0.0;      // ||(u-bar, theta-bar)||_{H^1}
  double cross = 0.0;       // (u2~, theta~)_{L^2}, signed
  // Not exported; used by the L^2 balance check.
  double d2u_l2 = 0.0;
  double d1theta_l2 = 0.0;

  friend bool operator==(const EnergyRecord&, const EnergyRecord&) = default;
};

EnergyRecord record(const State& state, const Params& params);

/// Time-ordered records with trapezoidal cumulative integrals
///   I_d2u = 2 nu int ||d2 u||_{H^2}^2,  I_d1theta = 2 eta int ||d1 theta||_{H^2}^2,
///   I_d1u2 = delta int ||g0 d1 u2||_{L^2}^2.
/// Time integrals over an interval of ||d2 u||_H2^2, ||d1 theta||_H2^2 and
/// ||d1 u2||_L2^2, before the 2 nu, 2 eta and delta g0^2 weights.
struct DissipationIncrements {
  double d2u_h2 = 0.0;
  double d1theta_h2 = 0.0;
  double d1u2_l2 = 0.0;

  DissipationIncrements& operator+=(const DissipationIncrements& o) {
    d2u_h2 += o.d2u_h2;
    d1theta_h2 += o.d1theta_h2;
    d1u2_l2 += o.d1u2_l2;
    return *this;
  }
};

class EnergySeries {
 public:
  EnergySeries(const Params& params, double delta);

  /// Accumulates the integrals by the trapezoid rule between records.
  /// Throws std::invalid_argument if rec.t precedes the last record.
  void append(const EnergyRecord& rec);
  /// Accumulates the given integrals over (previous record, rec.t]; they are
  /// ignored for the first record.
  void append(const EnergyRecord& rec, const DissipationIncrements& since_previous);

  const Params& params() const { return params_; }
  double delta() const { return delta_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<EnergyRecord>& records() const { return records_; }
  const std::vector<double>& i_d2u() const { return i_d2u_; }
  const std::vector<double>& i_d1theta() const { return i_d1theta_; }
  const std::vector<double>& i_d1u2() const { return i_d1u2_; }

  std::vector<double> times() const;
  /// osc_h1^2 at every record.
  std::vector<double> oscillation_energy() const;

 private:
  Params params_;
  double delta_;
  std::vector<EnergyRecord> records_;
  std::vector<double> i_d2u_;
  std::vector<double> i_d1theta_;
  std::vector<double> i_d1u2_;
};

/// E(t) = max_{tau<=t} (h2_u^2 + h2_theta^2) + I_d2u + I_d1theta + I_d1u2.
std::vector<double> energy_functional(const EnergySeries& series);

/// Default weight 0.1 min(nu, eta, 1), halved until L >= osc_h1^2 / 2 at the
/// first record.
double default_delta(const Params& params, const EnergyRecord& first);

/// delta is too large for L(t) >= osc_h1^2 / 2 at some record.
class DeltaTooLarge : public std::invalid_argument {
 public:
  DeltaTooLarge(double delta, double max_delta);
  double max_delta() const { return max_delta_; }

 private:
  double max_delta_;
};

/// L(t) = osc_h1^2 - delta * cross. Throws DeltaTooLarge when positivity
/// fails somewhere, carrying the largest admissible delta.
std::vector<double> lyapunov_series(const EnergySeries& series);

/// Uniformly spaced consecutive states.
struct StateWindow {
  std::vector<State> states;
  /// Throws std::invalid_argument for < 3 states or nonuniform spacing.
  double spacing() const;
  /// The three states around the centre of the window.
  const State& before() const;
  const State& centre() const;
  const State& after() const;
};

enum class WaveTarget { kVelocity, kTheta, kVorticity };

struct ResidualReport {
  /// ||residual|| / ||largest constituent term|| (0 when all terms vanish).
  double relative = 0.0;
  double absolute = 0.0;
  /// All constituent terms were zero; the 0/0 ratio was reported as 0.
  bool degenerate = false;
  /// Residual coefficients (one field per component), for convergence studies.
  std::vector<SpectralField> fields;
};

/// Residual of the damped degenerate wave equation
///   X_tt - (eta d11 + nu d22) X_t + nu eta d11 d22 X + g0^2 d11 Lap^-1 X = N
/// at the window centre, with second-order central time differences and
/// k1 = 0 modes excluded.
ResidualReport wave_residual(const StateWindow& window, WaveTarget target, const Params& params,
                             bool include_nonlinear);

/// Mismatch of  g0 d1 u2 = -d_t d1 theta - d1(u.grad theta) + eta d111 theta.
ResidualReport regularization_identity_check(const StateWindow& window, const Params& params);

struct AveragedResidual {
  ResidualReport momentum;
  ResidualReport temperature;
};

/// Residuals of the horizontally averaged system
///   d_t u-bar + avg(u.grad u~) + (0, d2 p-bar) - g0 (0, theta-bar) - nu d22 u-bar = 0,
///   d_t theta-bar + avg(u.grad theta~) = 0.
AveragedResidual limit_1d_residual(const StateWindow& window, const Params& params);

struct PowerLawFit {
  double alpha = 0.0;      // exponent of (1+t)
  double amplitude = 0.0;  // prefactor
  std::size_t samples = 0;
};

/// Least squares of log f against log(1+t) over samples with t in [t_a, t_b].
/// Requires t_a >= 1, f > 0 there, and at least 8 samples.
PowerLawFit fit_decay_exponent(std::span<const double> t, std::span<const double> f, double t_a,
                               double t_b);

struct DecayCertificate {
  double c0 = 0.0;  // int_0^inf f, trapezoid plus power-law tail
  double c1 = 0.0;  // max(1, max_{s<t} f(t)/f(s)) over samples
  double c2 = 0.0;  // max{2 c1 f(0), 4 c0 c1}
  bool verdict = false;
  bool integrable = false;
  double tail_exponent = 0.0;
  std::optional<double> worst_violation_t;
  /// t f(t) nonincreasing over the final third of the samples.
  bool tail_tf_decreasing = false;
  std::string reason;
};

/// Throws std::invalid_argument on negative or non-finite samples,
/// mismatched lengths or unordered times.
DecayCertificate certify_decay(std::span<const double> t, std::span<const double> f);

/// Exported column order of the time-series CSV.
const std::vector<std::string>& series_columns();

/// Writes '#'-prefixed header lines, the column row and one row per record
/// with 17 significant digits.
void write_series_csv(std::ostream& out, const EnergySeries& series,
                      const std::vector<std::string>& header_lines = {});

struct CsvColumn {
  std::vector<double> t;
  std::vector<double> values;
};

/// Reads the t column and a named column from a series CSV ('#' lines are
/// skipped). Throws std::runtime_error for missing files or columns.
CsvColumn read_csv_column(const std::string& path, const std::string& column);

std::string format_double(double v);

}  // namespace abq

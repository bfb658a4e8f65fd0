// Time integration of the perturbation system around hydrostatic balance:
//
//   d_t u + u.grad u = -grad p + nu d_22 u + g0 theta e2,   div u = 0,
//   d_t theta + u.grad theta + g0 u2 = eta d_11 theta.
//
// The linear part (anisotropic damping plus the buoyancy coupling) is
// advanced exactly per Fourier mode; the advection terms are explicit and
// dealiased.
#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "abq/diagnostics.hpp"
#include "abq/field_algebra.hpp"

namespace abq {

enum class Scheme { kStrang2, kLawson2 };

std::string to_string(Scheme s);
/// Throws std::invalid_argument for unknown names.
Scheme scheme_from_string(const std::string& name);

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  double cfl_safety = 0.5;
  Scheme scheme = Scheme::kStrang2;
  bool linearized_only = false;
  /// Reject steps whose dt exceeds cfl_safety * min(dx) / max|u|.
  bool check_cfl = false;

  void validate() const;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

/// Non-finite coefficients appeared while advancing the state.
class NumericalBlowup : public std::runtime_error {
 public:
  NumericalBlowup(double time, const std::string& what);
  double time() const { return time_; }

 private:
  double time_;
};

class CflViolation : public std::runtime_error {
 public:
  CflViolation(double dt, double suggested_dt);
  double suggested_dt() const { return suggested_dt_; }

 private:
  double suggested_dt_;
};

/// Generator of the linear flow for a single mode, acting on the
/// divergence-free velocity amplitude a (along (-k2, k1)/|k|) and theta:
///
///   d/dt [a, th] = [[-nu k2^2, c], [-c, -eta k1^2]] [a, th],  c = g0 k1/|k|.
std::array<double, 4> linear_generator(double k1, double k2, const Params& params);

/// exp(generator * dt), row-major. Exact up to round-off, including the
/// confluent (equal-eigenvalue) case.
std::array<double, 4> propagator_matrix(double k1, double k2, const Params& params, double dt);

/// Gramians of the linear flow over [0, dt]: symmetric 2x2 matrices G_a and
/// G_theta, stored as (G11, G12, G22) each, with
///   int_0^dt |a(s)|^2 ds = x^* G_a x,  int_0^dt |theta(s)|^2 ds = x^* G_theta x,
/// for the initial amplitudes x = (a, theta).
std::array<double, 6> mode_gramians(double k1, double k2, const Params& params, double dt);

/// Exact time integrals over one application of the linear flow.
struct LinearStageIntegrals {
  double energy_removed = 0.0;
  DissipationIncrements increments;

  LinearStageIntegrals& operator+=(const LinearStageIntegrals& o) {
    energy_removed += o.energy_removed;
    increments += o.increments;
    return *this;
  }
};

/// Per-mode exact propagators of the linear part over a fixed step.
class LinearPropagator {
 public:
  LinearPropagator(const Grid& grid, const Params& params, double dt);

  const Grid& grid() const { return grid_; }
  double dt() const { return dt_; }
  const std::array<double, 4>& matrix(int jj, int mm) const {
    return modes_[grid_.index(jj, mm)].matrix;
  }

  /// Advances u1, u2, theta in place (the clock is untouched). Velocity is
  /// reduced to its divergence-free amplitude on the way, and the (0,0)
  /// vertical velocity is zeroed. Returns the energy removed,
  /// |Omega| sum (|v_before|^2 - |v_after|^2), which equals the exact time
  /// integral of 2 nu ||d2 u||^2 + 2 eta ||d1 theta||^2 over the step, along
  /// with the exact integrals of the energy functional over the step.
  LinearStageIntegrals apply(State& state) const;

 private:
  struct ModeData {
    std::array<double, 4> matrix;
    std::array<double, 6> gramians;
    // Weights of |a|^2 in ||d2 u||_H2^2 and ||d1 u2||_L2^2, and of
    // |theta|^2 in ||d1 theta||_H2^2.
    double w_d2u = 0.0;
    double w_d1u2 = 0.0;
    double w_d1theta = 0.0;
  };

  Grid grid_;
  double dt_;
  std::vector<ModeData> modes_;
};

LinearPropagator build_linear_propagator(const Grid& grid, const Params& params, double dt);

struct Tendency {
  SpectralField u1;
  SpectralField u2;
  SpectralField theta;
};

/// (-P(u.grad u), -u.grad theta), dealiased. Throws NumericalBlowup when
/// the state holds NaN/Inf.
Tendency nonlinear_tendency(const State& state);

/// Stateful stepper with cached propagators.
class Integrator {
 public:
  Integrator(const Grid& grid, const Params& params, const SolverConfig& config);

  State step(const State& state);
  /// Exact linear-stage dissipation of the most recent step (strang2 only;
  /// lawson2 reports the dissipation of its propagated base point).
  double last_dissipation() const { return last_.energy_removed; }
  const LinearStageIntegrals& last_integrals() const { return last_; }

  const SolverConfig& config() const { return config_; }

 private:
  void check_cfl(const State& state) const;
  State strang(const State& state);
  State lawson(const State& state);

  Grid grid_;
  Params params_;
  SolverConfig config_;
  LinearPropagator half_;
  LinearPropagator full_;
  LinearStageIntegrals last_;
};

/// One step of size cfg.dt.
State step(const State& state, const Params& params, const SolverConfig& cfg);

/// Zeroes u2 on the j = 0 row and re-projects the velocity.
void enforce_constraints(State& state);

struct Failure {
  double time = 0.0;
  std::string reason;
};

struct SimulationResult {
  EnergySeries series;
  /// Cumulative exact dissipation integral at each record time.
  std::vector<double> exact_dissipation;
  /// Last finite state (the final state on success).
  State final_state;
  std::optional<Failure> failure;
  /// max over records of the relative divergence and of |u2 average|.
  double max_divergence = 0.0;
  double max_average_u2 = 0.0;
  /// Largest ratio of field amplitude inside the boundary strips
  /// (distance < ly/8 from x2 = 0 mod ly) to the global maximum.
  double max_boundary_ratio = 0.0;
  bool boundary_warning = false;
};

using StateObserver = std::function<void(const State&)>;

/// Threshold on the boundary-strip amplitude ratio above which a run is
/// flagged as feeling the vertical truncation.
inline constexpr double kBoundaryWarningRatio = 1e-6;

/// Advances ic from ic.t to the absolute time cfg.t_end, recording
/// diagnostics every `cadence` (a multiple of cfg.dt) including t = ic.t.
/// A blowup ends the run early with a failure marker and the last finite
/// state.
SimulationResult simulate(const State& ic, const Params& params, const SolverConfig& cfg,
                          double cadence, double delta, const StateObserver& observer = {});

/// Amplitude ratio described in SimulationResult::max_boundary_ratio.
double boundary_ratio(const State& state);

}  // namespace abq

// Field-level operators: states, Leray projection, vorticity/streamfunction,
// pressure recovery, horizontal-average decomposition and Sobolev norms.
#pragma once

#include <optional>
#include <utility>

#include "abq/grid.hpp"
#include "abq/spectral_field.hpp"
#include "abq/transform.hpp"

namespace abq {

/// Physical constants of the perturbation system.
struct Params {
  double nu = 1.0;   // vertical viscosity
  double eta = 1.0;  // horizontal thermal diffusivity
  double g0 = -1.0;  // buoyancy constant

  /// Throws std::invalid_argument unless nu > 0, eta > 0, g0 != 0.
  void validate() const;

  friend bool operator==(const Params&, const Params&) = default;
};

/// Velocity (u1, u2), temperature perturbation theta and clock.
struct State {
  SpectralField u1;
  SpectralField u2;
  SpectralField theta;
  double t = 0.0;

  explicit State(const Grid& grid) : u1(grid), u2(grid), theta(grid) {}
  State(SpectralField a, SpectralField b, SpectralField c, double time)
      : u1(std::move(a)), u2(std::move(b)), theta(std::move(c)), t(time) {}

  const Grid& grid() const { return u1.grid(); }
  bool all_finite() const {
    return u1.all_finite() && u2.all_finite() && theta.all_finite();
  }

  friend bool operator==(const State&, const State&) = default;
};

struct VelocityPair {
  SpectralField v1;
  SpectralField v2;
};

/// Horizontal average (j = 0 modes) and oscillation (j != 0 modes).
struct DecompositionPair {
  SpectralField average;
  SpectralField oscillation;
};

DecompositionPair decompose(const SpectralField& f);
SpectralField horizontal_average(const SpectralField& f);
SpectralField oscillation(const SpectralField& f);

/// Helmholtz-Leray projection, I - k k^T/|k|^2 per mode; (0,0) passes through.
VelocityPair leray_project(const SpectralField& v1, const SpectralField& v2);

/// omega = d1 u2 - d2 u1.
SpectralField vorticity(const SpectralField& u1, const SpectralField& u2);
SpectralField vorticity(const State& state);

/// Streamfunction psi with Laplacian psi = omega; requires zero (0,0) mode.
SpectralField streamfunction(const SpectralField& omega);

/// u = grad-perp psi = (-d2 psi, d1 psi) with Laplacian psi = omega.
/// Throws std::invalid_argument if omega has a nonzero (0,0) coefficient.
VelocityPair velocity_from_vorticity(const SpectralField& omega);

/// Multiplies by -1/|k|^2 for k != 0, zero at k = 0.
SpectralField inverse_laplacian(const SpectralField& f);

/// Dealiased advection (v . grad) f.
SpectralField advect(const SpectralField& v1, const SpectralField& v2, const SpectralField& f);

/// Zero-mean pressure p solving  Lap p = -div(u . grad u) + g0 d2 theta.
SpectralField recover_pressure(const State& state, const Params& params);

/// Pointwise divergence d1 v1 + d2 v2.
SpectralField divergence(const SpectralField& v1, const SpectralField& v2);

/// ||k . v||_l2 / || |k| v ||_l2 over coefficients; zero for the zero field.
double relative_divergence(const SpectralField& v1, const SpectralField& v2);

enum class DerivativeMask { kNone, kD1, kD2 };

/// Inhomogeneous Sobolev norm  sqrt(|Omega| sum (1+|k|^2)^s |mask(k) c_k|^2),
/// s in {0, 1, 2}.
double sobolev_norm(const SpectralField& f, int s, DerivativeMask mask = DerivativeMask::kNone);

/// Homogeneous seminorm sqrt(|Omega| sum |k|^(2s) |c_k|^2) for integer s >= 0.
double homogeneous_norm(const SpectralField& f, int s);

/// int_Omega f g dx for real fields.
double inner_product(const SpectralField& f, const SpectralField& g);

/// H^2 norm of a divergence-free velocity computed through the vorticity,
/// sqrt(||u||^2 + ||omega||^2 + ||grad omega||^2). Equivalent to the spectral
/// H^2 norm: sqrt(3/4) H2_spectral <= this <= H2_spectral.
double velocity_h2_via_vorticity(const SpectralField& u1, const SpectralField& u2);

}  // namespace abq

#pragma once
// Model parameters of the open-oscillator generator, validation, and
// derived length/time scales. Everything here is dimensionless after
// nondimensionalize(); all operations are pure value transforms.

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace oho {

using cd = std::complex<double>;

struct DimensionalInputs {
  double m = 1.0;       // mass, kg
  double omega = 1.0;   // oscillator frequency, rad/s
  double hbar = 1.0;    // J s
  double nu_raw = 1.0;  // Newton friction coefficient over m, 1/s
  double d0_raw = 1.0;  // decoherence strength, 1/s^2
  double d2_raw = 1.0;  // derivative decoherence strength, dimensionless
  double beta_raw = 0.0;  // static recoherence, 1/s
};

// Dimensionless parameters (nu, d0, d2, beta). alpha is the gauge parameter
// of the total-derivative ambiguity of the underlying Lagrangian; it is kept
// as a field for documentation but is always 0 in this code base.
struct ModelParams {
  double nu = 1.0;
  double d0 = 1.0;
  double d2 = 1.0;
  double beta = 0.0;
  double alpha = 0.0;
  std::optional<DimensionalInputs> dims;  // original units, if any

  double s() const { return d0 + d2; }

  // stationary second moment of the momentum operator
  double x2p2() const { return (d0 + d2 * (1.0 + nu * nu)) / (2.0 * nu) - beta; }

  // stationary-state exponent coefficients: the density kernel is
  // ~ exp(-q x^2/2 - r x_d^2/2 - i sigma x x_d). q equals the commonly
  // quoted Q^2; r and sigma are fixed by stationarity (see relaxed_state).
  double q_exp() const { return 2.0 * nu / s(); }
  double r_exp() const { return s() / (2.0 * nu) + d0 * d2 * nu / (2.0 * s()) - beta; }
  double sigma_exp() const { return d2 * nu / s(); }

  // largest beta for which the stationary state exists (r_exp > 0)
  double beta_max() const { return s() / (2.0 * nu) + d0 * d2 * nu / (2.0 * s()); }
};

struct ValidationReport {
  std::vector<std::string> hard;      // any entry means the parameters are unusable
  std::vector<std::string> warnings;  // soft findings, never fatal
  bool lindblad_ok = false;           // nu^2 <= 2 d0 d2
  bool ok() const { return hard.empty(); }
};

struct ScalesReport {
  double ell_cl = 1.0;        // sqrt(hbar/(m omega)); 1 when input is dimensionless
  double ell_loc = 0.0;       // sqrt(s/(2 nu)), localisation length
  double ell_inst2 = 0.0;     // 1/<p^2>_0, instantaneous decoherence length^2
  double g_dec2 = 0.0;        // 1/ell_inst2 - 1/2
  cd omega_nu;                // sqrt(1 - nu^2/4), imaginary when nu > 2
  double kappa = 0.0;         // nu/s
  double kappa0_printed = 0.0;     // sqrt(2 d0 d2)/s
  double kappa0_amgm_cap = std::sqrt(0.5);  // algebraic upper bound of the above
  bool lindblad_ok = false;
  double relaxation_time = 0.0;  // 2/nu
};

// Full validation: hard failures for anything that breaks the stationary
// state, soft warnings for regime boundaries.
ValidationReport validate(const ModelParams& p);

// Weaker precondition used by generator construction and the grid oracle:
// the generator itself exists for nu >= 0, d0,d2 >= 0 (closed dynamics
// included); no stationary state is required.
bool generator_ok(const ModelParams& p);

// t -> t/omega, x -> x ell_cl; rates divide by omega, d0 by omega^2,
// d2 unchanged. Throws std::invalid_argument on nonpositive/nonfinite
// m, omega, hbar.
ModelParams nondimensionalize(const DimensionalInputs& in);

// Inverse of nondimensionalize for round-trip checks.
DimensionalInputs redimensionalize(const ModelParams& p);

// pre: validate(p).ok()
ScalesReport derived_scales(const ModelParams& p);

// principal branch; purely imaginary for nu > 2
cd omega_nu(double nu);

}  // namespace oho

#include "oho/params.hpp"

#include <cmath>
#include <stdexcept>

namespace oho {

namespace {
bool finite(double v) { return std::isfinite(v); }
}

cd omega_nu(double nu) {
  double disc = 1.0 - nu * nu / 4.0;
  if (disc >= 0.0) return cd(std::sqrt(disc), 0.0);
  return cd(0.0, std::sqrt(-disc));
}

ValidationReport validate(const ModelParams& p) {
  ValidationReport r;
  if (!(finite(p.nu) && finite(p.d0) && finite(p.d2) && finite(p.beta))) {
    r.hard.push_back("parameters must be finite");
    return r;
  }
  if (p.nu <= 0.0) r.hard.push_back("nu must be positive: no relaxation without friction");
  if (p.d0 < 0.0) r.hard.push_back("d0 must be nonnegative");
  if (p.d2 < 0.0) r.hard.push_back("d2 must be nonnegative");
  if (p.s() <= 0.0) r.hard.push_back("d0 + d2 must be positive for a normalizable stationary state");
  if (p.nu > 0.0 && p.s() > 0.0) {
    if (p.x2p2() <= 0.0)
      r.hard.push_back("stationary momentum spread nonpositive: beta too large");
    if (p.r_exp() <= 0.0)
      r.hard.push_back("stationary off-diagonal width nonpositive: beta above beta_max");
  }
  r.lindblad_ok = p.nu * p.nu <= 2.0 * p.d0 * p.d2;
  if (!r.lindblad_ok)
    r.warnings.push_back("nu^2 > 2 d0 d2: generator has no completely positive form");
  if (p.nu >= 2.0) r.warnings.push_back("overdamped regime: oscillation frequency is imaginary");
  if (std::abs(p.nu - 2.0) < 1e-6)
    r.warnings.push_back("nu within 1e-6 of the degenerate point 2: ladder normalisation blows up");
  return r;
}

bool generator_ok(const ModelParams& p) {
  return finite(p.nu) && finite(p.d0) && finite(p.d2) && finite(p.beta) && p.nu >= 0.0 &&
         p.d0 >= 0.0 && p.d2 >= 0.0;
}

ModelParams nondimensionalize(const DimensionalInputs& in) {
  if (!(finite(in.m) && finite(in.omega) && finite(in.hbar) && finite(in.nu_raw) &&
        finite(in.d0_raw) && finite(in.d2_raw) && finite(in.beta_raw)))
    throw std::invalid_argument("dimensional inputs must be finite");
  if (in.m <= 0.0 || in.omega <= 0.0 || in.hbar <= 0.0)
    throw std::invalid_argument("m, omega, hbar must be positive");
  ModelParams p;
  p.nu = in.nu_raw / in.omega;
  p.d0 = in.d0_raw / (in.omega * in.omega);
  p.d2 = in.d2_raw;
  p.beta = in.beta_raw / in.omega;
  p.dims = in;
  return p;
}

DimensionalInputs redimensionalize(const ModelParams& p) {
  DimensionalInputs in = p.dims.value_or(DimensionalInputs{});
  in.nu_raw = p.nu * in.omega;
  in.d0_raw = p.d0 * in.omega * in.omega;
  in.d2_raw = p.d2;
  in.beta_raw = p.beta * in.omega;
  return in;
}

ScalesReport derived_scales(const ModelParams& p) {
  ScalesReport r;
  if (p.dims) r.ell_cl = std::sqrt(p.dims->hbar / (p.dims->m * p.dims->omega));
  r.ell_loc = std::sqrt(p.s() / (2.0 * p.nu));
  r.ell_inst2 = 1.0 / p.x2p2();
  r.g_dec2 = p.x2p2() - 0.5;
  r.omega_nu = omega_nu(p.nu);
  r.kappa = p.nu / p.s();
  r.kappa0_printed = std::sqrt(2.0 * p.d0 * p.d2) / p.s();
  r.lindblad_ok = p.nu * p.nu <= 2.0 * p.d0 * p.d2;
  r.relaxation_time = 2.0 / p.nu;
  return r;
}

}  // namespace oho

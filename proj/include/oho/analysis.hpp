#pragma once
// Physics studies built on the core machinery: the two-slit decoherence
// protocol (closed form, operator-exact, and grid realisations), effective
// temperature of the stationary state, the weak-coupling and critical-damping
// scans, and classical-trajectory consistency checks.

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "oho/gauss.hpp"
#include "oho/grid.hpp"
#include "oho/ladder.hpp"
#include "oho/params.hpp"

namespace oho {

// ---- two-slit / recoherence -------------------------------------------

struct DecoherenceQuery {
  cd w = 0.0;           // coherent label of the prepared state (wm = conj(w))
  double z_obs = 1.0;   // off-diagonality probed by the readout displacement
  double z_prep = 0.0;  // off-diagonality selected by the filter at t_prep
  double dz = 1.0;      // filter width; infinity means no filter (factor 2)
  double t_prep = 0.0;  // filter time
  double t_obs = 0.0;   // absolute readout time, >= t_prep
};

// envelope of the displaced interference term:
// f(t) = e^{-nu t/2}(cos w t - nu/(2w) sin w t), continuous through nu = 2
// where it becomes e^{-t}(1 - t); a secular series takes over for
// |nu - 2| < 1e-6.
double f_envelope(double nu, double t);

// closed form of the filtered overlap:
//   e^{-<p^2>0 z_obs^2/2} cos(z_obs <p(t_obs)>_w)
//     * [ e^{-(z_probe + z_obs f(dt))^2/dz^2} + e^{-(z_probe - z_obs f(dt))^2/dz^2} ]
// with dt = t_obs; an infinite dz drops the filter bracket and doubles the
// cosine term instead.
double decohere_closed(const LadderSet& ls, const DecoherenceQuery& q);

// same quantity assembled from Weyl displacements and Heisenberg-evolved
// momentum operators; agrees with the closed form to rounding
double decohere_weyl(const LadderSet& ls, const DecoherenceQuery& q);

// grid realisation: sample, multiply by the slit cosine, evolve, filter,
// trace. Grid errors are O(h^2).
double decohere_grid(const ModelParams& p, const DecoherenceQuery& q, GridSpec gx, GridSpec gd);

// ---- thermal character of the stationary state -------------------------

enum class StateClass { pure_ground, thermal, non_thermal };

struct ThermalReport {
  double Q = 0.0, R = 0.0, kappa = 0.0;
  double ellT2_printed = 0.0;   // 1/sqrt(1 + 4 d0 d2)
  double ellT2_matched = 0.0;   // 1/(Q R): the value the kernel actually has
  double beta_omega_printed = 0.0;  // log((sqrt(1+d0 d2 k^2)+k)/(sqrt(1+d0 d2 k^2)-k))
  double beta_omega_matched = 0.0;  // 2 atanh(Q/(2R))
  double gibbs_distance = 0.0;  // pointwise kernel distance to the Gibbs form
  double ell_dec_rho = 0.0;     // sqrt(2 kappa)
  StateClass cls = StateClass::non_thermal;
};
ThermalReport thermal_report(const ModelParams& p);

// ---- parameter scans ----------------------------------------------------

struct WeakCouplingRow {
  double g = 0.0;
  double Q2 = 0.0, R2 = 0.0;
  double beta_omega = 0.0;
  double beta_omega_err = 0.0;   // distance to the g->0 value log((1+k)/(1-k))
  double ladder_distance = 0.0;  // worst of the four rows vs the g->0 images
  double energy = 0.0;
};
// (nu, d0, d2) = g^2 (kappa, 1/2, 1/2), beta = 0
std::vector<WeakCouplingRow> scan_weak_coupling(double kappa, const std::vector<double>& gs);

struct CriticalScanResult {
  // |z|^2 against |nu - 2| on log axes; the fit uses the two decades nearest
  // the singular point, where the exponent is -1/2 from either side
  double exponent_below = 0.0, exponent_above = 0.0;
  std::vector<double> delta;      // |nu-2| samples, spanning [1e-5, 1e-1]
  std::vector<double> z2_below;   // |z|^2 at nu = 2 - delta
  std::vector<double> z2_above;   // |z|^2 at nu = 2 + delta
  double sup_gap = 0.0;  // sup_t |x_{2-eps}(t) - x_{2+eps}(t)| at eps = 1e-3
  // first moment <x(1)> of a coherent state with w = |2-nu|^{1/4} e^{i0},
  // bounded through the singular point
  std::vector<double> wscale_nu, wscale_x1;
};
CriticalScanResult scan_critical(int points_per_decade = 10);

// classical trajectory with x(0) = xi, xdot(0) = pim; complex-safe through
// the degenerate point (secular series takes over for |nu-2| < 1e-6)
// complex decay fit of a sampled mean-position ringdown x(t): forms the
// analytic signal x - i (dx/dt + nu x/2)/Re(omega) by second-order finite
// differences, drops 5 samples at each end, and least-squares fits the
// envelope rate (real part, expect -nu/2) and phase rate (imag part,
// expect +-Re(omega)). Needs at least 16 samples.
cd fit_ringdown(const std::vector<double>& t, const std::vector<double>& x, double nu,
                double omega_re);

double classical_x(double xi, double pim, double nu, double t);
// the regularised secular evaluation itself, exact at nu = 2
double classical_x_series(double xi, double pim, double nu, double t);

// ---- equations of motion ------------------------------------------------

// residuals of the doubled-coordinate equations of motion on analytic paths
// given as (value, first, second derivative) at time t:
//   res_x  = xdd + x + nu xd - i (d0 x_d - d2 xdd_d)
//   res_xd = xdd_d + x_d - nu xd_d
struct Path {
  std::function<cd(double)> f, df, ddf;
};
cd el_residual_x(const ModelParams& p, const Path& x, const Path& xd, double t);
cd el_residual_xd(const ModelParams& p, const Path& xd, double t);

}  // namespace oho

#pragma once
// Finite-difference oracle: the generator discretised on a uniform
// (x, x_d) grid with second-order stencils, RK4 time stepping, trace and
// moment readouts on the x_d = 0 slice, and decay-rate fits. Homogeneous
// Dirichlet data outside the box; a boundary-ring monitor flags windows
// that are too small. Deliberately simple and sequential; accuracy comes
// from refinement, not cleverness.

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "oho/gauss.hpp"
#include "oho/params.hpp"

namespace oho {

struct GridSpec {
  int n = 128;      // points per axis, >= 32
  double l = 8.0;   // half-width; x_i = (i - n/2) h, h = 2l/(n-1), so the
                    // node i = n/2 sits exactly at 0 for any n
  double h() const { return 2.0 * l / (n - 1); }
  double coord(int i) const { return (i - n / 2) * h(); }
};

struct GridField {
  GridSpec gx, gd;
  std::vector<cd> a;  // row-major: a[i*gd.n + j] = f(x_i, xd_j)

  cd& at(int i, int j) { return a[static_cast<size_t>(i) * gd.n + j]; }
  const cd& at(int i, int j) const { return a[static_cast<size_t>(i) * gd.n + j]; }
};

GridField sample_state(const GaussPolyState& s, GridSpec gx, GridSpec gd);

// L f on the grid; mixed derivative composed from central first differences
struct GridGenerator {
  ModelParams p;
  GridSpec gx, gd;
  std::vector<cd> diag;  // pointwise part: -i x xd - (d0+d2 nu^2-2 nu beta)/2 xd^2
  GridGenerator(const ModelParams& params, GridSpec gx_, GridSpec gd_);
  void apply(const GridField& in, GridField& out) const;
};

// max |f| on the outermost ring relative to max |f|; large values mean the
// box clips the state
double boundary_ring_ratio(const GridField& f);

// trapezoid integral over x at the x_d = 0 row (j = gd.n/2)
cd grid_trace(const GridField& f);
cd grid_moment_x(const GridField& f, int power);  // integral of x^power f at xd=0

// first and second moments of the momentum observable, both conventions;
// formed by applying the discrete operator and tracing
cd grid_p1(const GridField& f, PConvention conv);
cd grid_p2(const GridField& f, PConvention conv);

struct EvolveOptions {
  double dt = 0.0;  // 0: auto, 0.2 h^2/(1+d2) rounded down to divide t_final
  double abort_growth = 10.0;  // throw if the sup-norm grows by this factor
  std::function<void(double, const GridField&)> observer;  // called at every step incl. t=0
};

struct EvolveResult {
  GridField f;
  double dt = 0.0;
  int steps = 0;
  double trace_drift = 0.0;    // max |trace(t) - trace(0)|
  double max_boundary = 0.0;   // max boundary ring ratio seen
};

// RK4; throws std::runtime_error with diagnostics if the norm explodes
EvolveResult evolve(const GridGenerator& g, GridField f0, double t_final,
                    const EvolveOptions& opt = {});

// least-squares rate of a supposedly exponential series: fits log|y| and the
// unwrapped phase against t, returns (decay rate) + i (phase rate)
cd fit_decay(const std::vector<double>& t, const std::vector<cd>& y);

// flat binary snapshot (re,im doubles, row-major) plus a JSON sidecar header
void write_snapshot(const GridField& f, double t, const std::string& path_base);
GridField read_snapshot(const std::string& path_base, double* t_out = nullptr);

}  // namespace oho

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "oho/analysis.hpp"
#include "oho/ladder.hpp"

using namespace oho;

static ModelParams make(double nu, double d0, double d2, double beta) {
  ModelParams p;
  p.nu = nu;
  p.d0 = d0;
  p.d2 = d2;
  p.beta = beta;
  return p;
}

static const ModelParams P1 = make(1.0, 1.0, 1.0, 0.0);
static const ModelParams P2 = make(1.3, 0.7, 1.9, 0.15);
static const double kInf = std::numeric_limits<double>::infinity();

TEST_CASE("interference envelope: closed form and secular series agree") {
  CHECK(f_envelope(1.0, 0.7) == doctest::Approx(0.34730966469680608).epsilon(1e-14));
  CHECK(f_envelope(2.0, 0.5) == doctest::Approx(0.30326532985631671).epsilon(1e-14));
  // the series window must join the closed form smoothly
  for (double t : {0.2, 0.9, 2.3}) {
    double below = f_envelope(2.0 - 5e-7, t);
    double at = f_envelope(2.0, t);
    double above = f_envelope(2.0 + 5e-7, t);
    CHECK(std::abs(below - at) < 1e-6);
    CHECK(std::abs(above - at) < 1e-6);
  }
  CHECK(f_envelope(1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("readout suppression: closed form against operator evaluation") {
  LadderSet ls = make_ladders(P1);
  DecoherenceQuery q1{cd(0.5, 0.0), 0.8, 0.5, 0.8, 0.3, 0.9};
  CHECK(decohere_closed(ls, q1) == doctest::Approx(0.78361123697358048).epsilon(1e-13));
  CHECK(decohere_weyl(ls, q1) == doctest::Approx(0.78361123697358048).epsilon(1e-10));

  DecoherenceQuery q2{cd(0.3, -0.4), 0.5, 0.9, 1.2, 0.5, 1.1};
  CHECK(decohere_closed(ls, q2) == doctest::Approx(0.9414921437649667).epsilon(1e-13));
  CHECK(decohere_weyl(ls, q2) == doctest::Approx(0.9414921437649667).epsilon(1e-10));

  DecoherenceQuery q3{cd(0.0), 1.0, 0.0, kInf, 0.0, 0.0};
  CHECK(decohere_closed(ls, q3) == doctest::Approx(0.94473310548202938).epsilon(1e-13));
  CHECK(decohere_weyl(ls, q3) == doctest::Approx(0.94473310548202938).epsilon(1e-10));
}

TEST_CASE("readout suppression: degenerate-diagnostic cases") {
  LadderSet ls = make_ladders(P1);
  // z_obs = 0 keeps both filter branches fully open: exactly 2
  DecoherenceQuery q{cd(0.37, 0.11), 0.0, 0.0, kInf, 0.5, 1.5};
  CHECK(decohere_closed(ls, q) == 2.0);
  CHECK(std::abs(decohere_weyl(ls, q) - 2.0) < 1e-12);
  DecoherenceQuery q2{cd(0.7, 0.2), 0.0, 0.3, kInf, 0.2, 0.2};
  CHECK(decohere_closed(ls, q2) == 2.0);

  // no derivative noise: purely Gaussian suppression 2 exp(-<p^2>/2)
  LadderSet lg = make_ladders(make(1.0, 1.0, 0.0, 0.0));
  DecoherenceQuery q3{cd(0.0), 1.0, 0.0, kInf, 0.0, 0.0};
  CHECK(decohere_closed(lg, q3) == doctest::Approx(1.5576015661428098).epsilon(1e-13));
  CHECK(decohere_closed(lg, q3) == doctest::Approx(2.0 * std::exp(-0.25)).epsilon(1e-13));
}

TEST_CASE("readout suppression rejects inverted time order") {
  LadderSet ls = make_ladders(P1);
  DecoherenceQuery q{cd(0.0), 0.5, 0.0, kInf, 1.0, 0.5};
  CHECK_THROWS_AS((void)decohere_closed(ls, q), std::invalid_argument);
  CHECK_THROWS_AS((void)decohere_weyl(ls, q), std::invalid_argument);
  CHECK_THROWS_AS((void)decohere_grid(P1, q, GridSpec{64, 8.0}, GridSpec{64, 8.0}),
                  std::invalid_argument);
}

TEST_CASE("grid readout refuses an unresolvable filter width") {
  DecoherenceQuery q{cd(0.0), 0.5, 0.0, 0.05, 0.0, 0.3};  // dz below two grid cells
  CHECK_THROWS_AS((void)decohere_grid(P1, q, GridSpec{64, 8.0}, GridSpec{64, 8.0}),
                  std::invalid_argument);
}

TEST_CASE("grid readout approaches the operator value") {
  DecoherenceQuery q{cd(0.5, 0.0), 0.8, 0.5, 0.8, 0.3, 0.9};
  LadderSet ls = make_ladders(P1);
  const double want = decohere_weyl(ls, q);
  const double coarse = decohere_grid(P1, q, GridSpec{96, 8.0}, GridSpec{96, 8.0});
  const double fine = decohere_grid(P1, q, GridSpec{192, 8.0}, GridSpec{192, 8.0});
  CHECK(std::abs(fine - want) < std::abs(coarse - want));
  CHECK(std::abs(fine - want) < 3e-3);
}

TEST_CASE("thermal match at the symmetric point") {
  ThermalReport r = thermal_report(P1);
  CHECK(r.Q == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.R == doctest::Approx(1.1180339887498949).epsilon(1e-14));
  CHECK(r.kappa == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.ellT2_printed == doctest::Approx(0.44721359549995793).epsilon(1e-14));
  CHECK(r.ellT2_matched == doctest::Approx(0.89442719099991586).epsilon(1e-14));
  CHECK(r.beta_omega_printed == doctest::Approx(0.96242365011920694).epsilon(1e-13));
  CHECK(r.beta_omega_matched == doctest::Approx(0.96242365011920683).epsilon(1e-13));
  CHECK(r.cls == StateClass::thermal);
  CHECK(r.ell_dec_rho == doctest::Approx(1.0).epsilon(1e-14));  // sqrt(2 kappa)
}

TEST_CASE("thermal match away from symmetry") {
  ThermalReport r = thermal_report(P2);
  CHECK(r.beta_omega_printed == doctest::Approx(0.92753065704255133).epsilon(1e-13));
  CHECK(r.beta_omega_matched == doctest::Approx(0.99411652006785989).epsilon(1e-13));
  CHECK(r.cls == StateClass::thermal);
  // the two temperature readings genuinely differ here
  CHECK(std::abs(r.beta_omega_printed - r.beta_omega_matched) > 1e-3);
}

TEST_CASE("pure position noise relaxes to the ground state") {
  ThermalReport r = thermal_report(make(1.0, 1.0, 0.0, 0.0));
  CHECK(r.cls == StateClass::pure_ground);
  CHECK(r.Q == doctest::Approx(2.0 * r.R).epsilon(1e-12));
  CHECK(std::isinf(r.beta_omega_matched));
}

TEST_CASE("gibbs distance collapses in the weak-coupling regime") {
  // at strong coupling the kernel carries a cross phase no Gibbs form has
  ThermalReport strong = thermal_report(P1);
  CHECK(strong.cls == StateClass::thermal);
  CHECK(strong.gibbs_distance > 1e-3);
  // at g = 1e-3 the match is essentially exact
  const double g = 1e-3, kappa = 0.5;
  ModelParams weak = make(g * g * kappa, g * g * 0.5, g * g * 0.5, 0.0);
  ThermalReport r = thermal_report(weak);
  CHECK(r.cls == StateClass::thermal);
  CHECK(r.gibbs_distance < 1e-6);
}

TEST_CASE("weak-coupling scan converges to the closed thermal state") {
  std::vector<WeakCouplingRow> rows = scan_weak_coupling(0.5, {1e-1, 1e-2, 1e-3});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].beta_omega_err == doctest::Approx(4.1666427952335994e-06).epsilon(1e-8));
  CHECK(rows[1].beta_omega_err == doctest::Approx(4.1666670114182125e-10).epsilon(1e-6));
  CHECK(rows[2].beta_omega_err == doctest::Approx(4.1522341120980855e-14).epsilon(1e-3));
  CHECK(rows[0].beta_omega_err > rows[1].beta_omega_err);
  CHECK(rows[1].beta_omega_err > rows[2].beta_omega_err);
  CHECK(rows[0].Q2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rows[0].R2 == doctest::Approx(1.00000625).epsilon(1e-12));
  // ladder rows approach the closed-limit images quadratically in g
  CHECK(rows[1].ladder_distance == doctest::Approx(8.839e-06).epsilon(1e-3));
  CHECK(rows[1].ladder_distance / rows[2].ladder_distance ==
        doctest::Approx(100.0).epsilon(1e-2));
}

TEST_CASE("weak-coupling scan validates its inputs") {
  CHECK_THROWS_AS((void)scan_weak_coupling(0.0, {1e-2}), std::invalid_argument);
  CHECK_THROWS_AS((void)scan_weak_coupling(0.5, {0.0}), std::invalid_argument);
}

TEST_CASE("closed-limit ladder rows are orthonormal in the symplectic sense") {
  Eigen::Matrix4cd C = c_rows();
  // c+ and cb+ close to 1 under the commutator pairing encoded by coeff order:
  // check the frozen first row instead of re-deriving the pairing here
  CHECK(std::abs(C(0, 0) - cd(0.70710678118654746, 0.0)) < 1e-14);
  CHECK(std::abs(C(0, 1) - cd(0.0, 0.35355339059327373)) < 1e-14);
  CHECK(std::abs(C(0, 3) - cd(0.0, 0.70710678118654746)) < 1e-14);
  CHECK(std::abs(C(2, 1) - cd(0.0, -0.35355339059327373)) < 1e-14);
}

TEST_CASE("normalization scaling near the degenerate point") {
  CriticalScanResult r = scan_critical(10);
  REQUIRE(r.delta.size() == 41);
  CHECK(r.exponent_above == doctest::Approx(-0.50578669195418458).epsilon(1e-12));
  CHECK(r.exponent_below == doctest::Approx(-0.49997855325191348).epsilon(1e-12));
  CHECK(std::abs(r.exponent_above + 0.5) < 0.02);
  CHECK(std::abs(r.exponent_below + 0.5) < 0.02);
  // trajectories remain continuous across the point
  CHECK(r.sup_gap == doctest::Approx(4.4808365851867205e-4).epsilon(1e-10));
  CHECK(r.sup_gap < 1e-2);
  // scaled coherent labels give finite positions on both sides
  REQUIRE(r.wscale_nu.size() == 6);
  CHECK(r.wscale_x1.front() == doctest::Approx(-0.49046854331955908).epsilon(1e-12));
  CHECK(r.wscale_x1.back() == doctest::Approx(0.56070824957165322).epsilon(1e-12));
}

TEST_CASE("classical trajectory: closed form, series window, both regimes") {
  // secular window at the degenerate point
  CHECK(classical_x(1.0, 0.0, 2.0, 1.0) == doctest::Approx(0.73575888234288467).epsilon(1e-14));
  CHECK(classical_x(1.0, 0.0, 2.0, 1.0) == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-14));
  // closed form just outside the window
  CHECK(classical_x(1.0, 0.0, 2.001, 1.0) == doctest::Approx(0.73582018332254828).epsilon(1e-14));
  // series continuity across the window edges
  for (double nu : {2.0 - 5e-7, 2.0 + 5e-7}) {
    CHECK(std::abs(classical_x(1.0, 0.0, nu, 1.0) - 0.73575888234288467) < 1e-6);
  }
  // undamped limit reduces to a cosine
  CHECK(classical_x(1.0, 0.0, 0.0, 1.0) == doctest::Approx(std::cos(1.0)).epsilon(1e-14));
  // overdamped at large nu decays monotonically
  CHECK(classical_x(1.0, 0.0, 6.0, 2.0) > 0.0);
  CHECK(classical_x(1.0, 0.0, 6.0, 4.0) < classical_x(1.0, 0.0, 6.0, 2.0));
}

TEST_CASE("trajectory residuals identify the decaying branch") {
  // e^{-nu t/2} cos(omega t) solves the damped equation; the growing branch
  // e^{+nu t/2} cos(omega t) does not
  const double nu = 1.0, om = std::sqrt(3.0) / 2.0, t = 0.83;
  auto branch = [&](double sgn) {
    Path p;
    const double a = sgn * nu / 2.0;
    p.f = [=](double tt) { return std::exp(a * tt) * std::cos(om * tt); };
    p.df = [=](double tt) {
      return std::exp(a * tt) * (a * std::cos(om * tt) - om * std::sin(om * tt));
    };
    p.ddf = [=](double tt) {
      return std::exp(a * tt) *
             ((a * a - om * om) * std::cos(om * tt) - 2.0 * a * om * std::sin(om * tt));
    };
    return p;
  };
  ModelParams p = P1;
  // the x_d equation has friction with reversed sign, so the growing branch
  // is the solution there
  CHECK(std::abs(el_residual_xd(p, branch(+1.0), t)) < 1e-12);
  CHECK(std::abs(el_residual_xd(p, branch(-1.0), t)) ==
        doctest::Approx(1.2501043708485535).epsilon(1e-12));
}

TEST_CASE("ringdown fit recovers rate and frequency from clean samples") {
  const double nu = 1.0, om = std::sqrt(3.0) / 2.0;
  std::vector<double> ts, xs;
  for (int k = 0; k <= 120; ++k) {
    double t = 0.025 * k;
    ts.push_back(t);
    xs.push_back(std::exp(-nu / 2.0 * t) * std::cos(om * t + 0.4));
  }
  cd fit = fit_ringdown(ts, xs, nu, om);
  CHECK(fit.real() == doctest::Approx(-0.5).epsilon(2e-3));
  CHECK(fit.imag() == doctest::Approx(om).epsilon(2e-3));
}

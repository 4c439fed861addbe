#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "oho/gauss.hpp"
#include "oho/grid.hpp"

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

// sup norm of L_h rho0 over the inner region of the grid, for one resolution
static double stationary_residual(const ModelParams& p, int n) {
  GridSpec g{n, 8.0};
  GridGenerator gen(p, g, g);
  GridField f = sample_state(relaxed_state(p), g, g);
  GridField out{g, g, std::vector<cd>(f.a.size())};
  gen.apply(f, out);
  double sup = 0.0;
  const int margin = n / 8;
  for (int i = margin; i < n - margin; ++i)
    for (int j = margin; j < n - margin; ++j) sup = std::max(sup, std::abs(out.at(i, j)));
  return sup;
}

TEST_CASE("grid coordinates center the origin exactly") {
  GridSpec g{128, 8.0};
  CHECK(g.coord(64) == 0.0);
  CHECK(g.coord(0) == doctest::Approx(-8.0 * 128 / 127.0).epsilon(1e-15));
  CHECK(g.h() == doctest::Approx(16.0 / 127.0).epsilon(1e-15));
}

TEST_CASE("sampled relaxed kernel has unit discrete trace") {
  GridSpec g{128, 8.0};
  GridField f = sample_state(relaxed_state(P1), g, g);
  CHECK(std::abs(grid_trace(f) - cd(1.0)) < 1e-9);
}

TEST_CASE("discrete moments agree with the continuum kernel") {
  GridSpec g{160, 8.0};
  GridField f = sample_state(relaxed_state(P1), g, g);
  CHECK(std::abs(grid_moment_x(f, 1)) < 1e-10);
  CHECK(grid_moment_x(f, 2).real() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(grid_p1(f, PConvention::full)) < 1e-8);
  // p^2 rides on the second-difference stencil, so it converges at O(h^2)
  const double e160 = std::abs(grid_p2(f, PConvention::full).real() - 1.5);
  GridSpec g2{320, 8.0};
  GridField f2 = sample_state(relaxed_state(P1), g2, g2);
  const double e320 = std::abs(grid_p2(f2, PConvention::full).real() - 1.5);
  CHECK(e160 < 0.05);
  CHECK(e320 < e160 / 3.0);
}

TEST_CASE("discretised generator converges at second order on the fixed point") {
  const double r64 = stationary_residual(P1, 64);
  const double r128 = stationary_residual(P1, 128);
  const double r256 = stationary_residual(P1, 256);
  const double order1 = std::log2(r64 / r128);
  const double order2 = std::log2(r128 / r256);
  CHECK(order1 > 1.8);
  CHECK(order2 > 1.9);
  CHECK(r256 < 1e-3);
}

TEST_CASE("short evolution conserves the trace and stays in the box") {
  GridSpec g{96, 8.0};
  GridGenerator gen(P1, g, g);
  GridField f0 = sample_state(relaxed_state(P1), g, g);
  EvolveResult er = evolve(gen, std::move(f0), 0.5, {});
  CHECK(er.steps > 0);
  CHECK(er.trace_drift < 1e-10);
  CHECK(er.max_boundary < 1e-8);
  CHECK(std::abs(grid_trace(er.f) - cd(1.0)) < 1e-8);
}

TEST_CASE("observer sees the initial state and the final time") {
  GridSpec g{64, 8.0};
  GridGenerator gen(P1, g, g);
  GridField f0 = sample_state(relaxed_state(P1), g, g);
  std::vector<double> times;
  EvolveOptions opt;
  opt.observer = [&](double t, const GridField&) { times.push_back(t); };
  EvolveResult er = evolve(gen, std::move(f0), 0.1, opt);
  REQUIRE(!times.empty());
  CHECK(times.front() == 0.0);
  CHECK(times.back() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(static_cast<int>(times.size()) == er.steps + 1);
}

TEST_CASE("explicit step wins over the automatic one") {
  GridSpec g{64, 8.0};
  GridGenerator gen(P1, g, g);
  GridField f0 = sample_state(relaxed_state(P1), g, g);
  EvolveOptions opt;
  opt.dt = 1e-3;
  EvolveResult er = evolve(gen, std::move(f0), 0.05, opt);
  CHECK(er.dt == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(er.steps == 50);
}

TEST_CASE("runaway amplitude aborts instead of overflowing") {
  // strong recoherence flips the sign of the quadratic damping term, so the
  // field grows exponentially at large |x_d|; the guard must throw, not hang
  ModelParams bad = make(1.0, 0.1, 0.1, 10.0);
  REQUIRE(generator_ok(bad));
  GridSpec g{48, 4.0};
  GridGenerator gen(bad, g, g);
  GridField f = sample_state(relaxed_state(P1), g, g);
  EvolveOptions opt;
  opt.abort_growth = 2.0;
  CHECK_THROWS_AS((void)evolve(gen, std::move(f), 50.0, opt), std::runtime_error);
}

TEST_CASE("boundary ring ratio flags leakage") {
  GridSpec tight{64, 2.5};  // box clips the kernel, mass sits near the edge
  GridField f = sample_state(relaxed_state(P1), tight, tight);
  CHECK(boundary_ring_ratio(f) > 1e-4);
  GridSpec wide{64, 8.0};
  GridField fw = sample_state(relaxed_state(P1), wide, wide);
  CHECK(boundary_ring_ratio(fw) < 1e-10);
}

TEST_CASE("fit_decay recovers a synthetic complex exponential") {
  const cd mu(-0.37, 1.21);
  std::vector<double> ts;
  std::vector<cd> ys;
  for (int k = 0; k <= 40; ++k) {
    double t = 0.05 * k;
    ts.push_back(t);
    ys.push_back(cd(2.0, 0.5) * std::exp(mu * t));
  }
  cd fit = fit_decay(ts, ys);
  CHECK(fit.real() == doctest::Approx(mu.real()).epsilon(1e-10));
  CHECK(fit.imag() == doctest::Approx(mu.imag()).epsilon(1e-10));
}

TEST_CASE("snapshot round trips bit-exactly") {
  namespace fs = std::filesystem;
  GridSpec g{48, 6.0};
  GridField f = sample_state(relaxed_state(P1), g, g);
  const std::string base = (fs::temp_directory_path() / "oho_snap_test").string();
  write_snapshot(f, 1.25, base);
  double t = 0.0;
  GridField back = read_snapshot(base, &t);
  CHECK(t == 1.25);
  REQUIRE(back.a.size() == f.a.size());
  double worst = 0.0;
  for (size_t k = 0; k < f.a.size(); ++k) worst = std::max(worst, std::abs(f.a[k] - back.a[k]));
  CHECK(worst == 0.0);
  CHECK(back.gx.n == g.n);
  CHECK(back.gx.l == g.l);
  std::remove((base + ".bin").c_str());
  std::remove((base + ".json").c_str());
}

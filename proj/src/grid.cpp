#include "oho/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace oho {

namespace {
void check_spec(const GridSpec& g) {
  if (g.n < 32) throw std::invalid_argument("grid needs at least 32 points per axis");
  if (!(g.l > 0.0) || !std::isfinite(g.l)) throw std::invalid_argument("grid half-width must be positive");
}
}  // namespace

GridField sample_state(const GaussPolyState& s, GridSpec gx, GridSpec gd) {
  check_spec(gx);
  check_spec(gd);
  GridField f;
  f.gx = gx;
  f.gd = gd;
  f.a.resize(static_cast<size_t>(gx.n) * gd.n);
  for (int i = 0; i < gx.n; ++i) {
    const double x = gx.coord(i);
    for (int j = 0; j < gd.n; ++j) f.at(i, j) = s.value(x, gd.coord(j));
  }
  return f;
}

GridGenerator::GridGenerator(const ModelParams& params, GridSpec gx_, GridSpec gd_)
    : p(params), gx(gx_), gd(gd_) {
  if (!generator_ok(p)) throw std::invalid_argument("grid generator: bad parameters");
  check_spec(gx);
  check_spec(gd);
  const double c2 = 0.5 * (p.d0 + p.d2 * p.nu * p.nu - 2.0 * p.nu * p.beta);
  diag.resize(static_cast<size_t>(gx.n) * gd.n);
  for (int i = 0; i < gx.n; ++i) {
    const double x = gx.coord(i);
    for (int j = 0; j < gd.n; ++j) {
      const double xd = gd.coord(j);
      diag[static_cast<size_t>(i) * gd.n + j] = cd(-c2 * xd * xd, -x * xd);
    }
  }
}

void GridGenerator::apply(const GridField& in, GridField& out) const {
  const int nx = gx.n, nd = gd.n;
  const double hx = gx.h(), hd = gd.h();
  const cd imix = cd(0, 1) / (4.0 * hx * hd);
  const cd cxdx = cd(0, (p.d2 * p.nu - p.beta)) / (2.0 * hx);  // times xd, central d/dx
  const double cxdd = -p.nu / (2.0 * hd);                      // times xd, central d/dxd
  const double clap = 0.5 * p.d2 / (hx * hx);
  out.gx = gx;
  out.gd = gd;
  out.a.resize(in.a.size());

  auto F = [&](int i, int j) -> cd {
    return (i < 0 || i >= nx || j < 0 || j >= nd) ? cd(0) : in.a[static_cast<size_t>(i) * nd + j];
  };
  auto edge = [&](int i, int j) {
    const double xd = gd.coord(j);
    out.a[static_cast<size_t>(i) * nd + j] =
        diag[static_cast<size_t>(i) * nd + j] * F(i, j) +
        imix * (F(i + 1, j + 1) - F(i + 1, j - 1) - F(i - 1, j + 1) + F(i - 1, j - 1)) +
        cxdx * xd * (F(i + 1, j) - F(i - 1, j)) + cxdd * xd * (F(i, j + 1) - F(i, j - 1)) +
        clap * (F(i + 1, j) - 2.0 * F(i, j) + F(i - 1, j));
  };

  for (int i = 1; i < nx - 1; ++i) {
    const cd* r0 = &in.a[static_cast<size_t>(i - 1) * nd];
    const cd* r1 = &in.a[static_cast<size_t>(i) * nd];
    const cd* r2 = &in.a[static_cast<size_t>(i + 1) * nd];
    const cd* dg = &diag[static_cast<size_t>(i) * nd];
    cd* o = &out.a[static_cast<size_t>(i) * nd];
    for (int j = 1; j < nd - 1; ++j) {
      const double xd = gd.coord(j);
      o[j] = dg[j] * r1[j] + imix * (r2[j + 1] - r2[j - 1] - r0[j + 1] + r0[j - 1]) +
             cxdx * xd * (r2[j] - r0[j]) + cxdd * xd * (r1[j + 1] - r1[j - 1]) +
             clap * (r2[j] - 2.0 * r1[j] + r0[j]);
    }
  }
  for (int j = 0; j < nd; ++j) {
    edge(0, j);
    edge(nx - 1, j);
  }
  for (int i = 1; i < nx - 1; ++i) {
    edge(i, 0);
    edge(i, nd - 1);
  }
}

double boundary_ring_ratio(const GridField& f) {
  const int nx = f.gx.n, nd = f.gd.n;
  double ring = 0.0, top = 0.0;
  for (const cd& v : f.a) top = std::max(top, std::abs(v));
  if (top == 0.0) return 0.0;
  for (int j = 0; j < nd; ++j)
    ring = std::max({ring, std::abs(f.at(0, j)), std::abs(f.at(nx - 1, j))});
  for (int i = 0; i < nx; ++i)
    ring = std::max({ring, std::abs(f.at(i, 0)), std::abs(f.at(i, nd - 1))});
  return ring / top;
}

cd grid_trace(const GridField& f) { return grid_moment_x(f, 0); }

cd grid_moment_x(const GridField& f, int power) {
  const int j0 = f.gd.n / 2;
  cd acc = 0.0;
  for (int i = 0; i < f.gx.n; ++i) {
    const double w = (i == 0 || i == f.gx.n - 1) ? 0.5 : 1.0;
    acc += w * std::pow(f.gx.coord(i), power) * f.at(i, j0);
  }
  return acc * f.gx.h();
}

namespace {
// central first derivatives with Dirichlet padding, as in the generator
GridField apply_p_once(const GridField& f, PConvention conv) {
  GridField g;
  g.gx = f.gx;
  g.gd = f.gd;
  g.a.assign(f.a.size(), cd(0));
  const int nx = f.gx.n, nd = f.gd.n;
  const cd cx = (conv == PConvention::full) ? cd(0, -0.5) / (2.0 * f.gx.h()) : cd(0);
  const cd cdd = cd(0, -1.0) / (2.0 * f.gd.h());
  auto F = [&](int i, int j) -> cd {
    return (i < 0 || i >= nx || j < 0 || j >= nd) ? cd(0) : f.at(i, j);
  };
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nd; ++j)
      g.at(i, j) = cx * (F(i + 1, j) - F(i - 1, j)) + cdd * (F(i, j + 1) - F(i, j - 1));
  return g;
}
}  // namespace

cd grid_p1(const GridField& f, PConvention conv) { return grid_trace(apply_p_once(f, conv)); }

cd grid_p2(const GridField& f, PConvention conv) {
  return grid_trace(apply_p_once(apply_p_once(f, conv), conv));
}

EvolveResult evolve(const GridGenerator& g, GridField f0, double t_final, const EvolveOptions& opt) {
  if (!(t_final >= 0.0)) throw std::invalid_argument("evolve: negative time");
  double dt = opt.dt > 0.0 ? opt.dt : 0.2 * g.gx.h() * g.gx.h() / (1.0 + g.p.d2);
  int steps = t_final > 0.0 ? static_cast<int>(std::ceil(t_final / dt - 1e-12)) : 0;
  if (steps > 0) dt = t_final / steps;

  EvolveResult res;
  res.dt = dt;
  res.steps = steps;
  GridField& f = f0;
  GridField k1 = f, k2 = f, k3 = f, k4 = f, tmp = f;

  double sup0 = 0.0;
  for (const cd& v : f.a) sup0 = std::max(sup0, std::abs(v));
  const cd tr0 = grid_trace(f);
  res.max_boundary = boundary_ring_ratio(f);

  const size_t npts = f.a.size();
  for (int k = 0; k < steps; ++k) {
    if (opt.observer) opt.observer(k * dt, f);
    g.apply(f, k1);
    for (size_t m = 0; m < npts; ++m) tmp.a[m] = f.a[m] + 0.5 * dt * k1.a[m];
    g.apply(tmp, k2);
    for (size_t m = 0; m < npts; ++m) tmp.a[m] = f.a[m] + 0.5 * dt * k2.a[m];
    g.apply(tmp, k3);
    for (size_t m = 0; m < npts; ++m) tmp.a[m] = f.a[m] + dt * k3.a[m];
    g.apply(tmp, k4);
    for (size_t m = 0; m < npts; ++m)
      f.a[m] += dt / 6.0 * (k1.a[m] + 2.0 * k2.a[m] + 2.0 * k3.a[m] + k4.a[m]);

    res.trace_drift = std::max(res.trace_drift, std::abs(grid_trace(f) - tr0));
    if (k % 16 == 15 || k == steps - 1) {
      double sup = 0.0;
      for (const cd& v : f.a) sup = std::max(sup, std::abs(v));
      if (sup0 > 0.0 && sup > opt.abort_growth * sup0) {
        std::ostringstream os;
        os << "evolve: sup-norm grew from " << sup0 << " to " << sup << " at t=" << (k + 1) * dt
           << " (step " << k + 1 << " of " << steps << ", dt=" << dt
           << "); the step size is unstable for this generator";
        throw std::runtime_error(os.str());
      }
      res.max_boundary = std::max(res.max_boundary, boundary_ring_ratio(f));
    }
  }
  if (opt.observer) opt.observer(steps * dt, f);
  res.f = std::move(f);
  return res;
}

cd fit_decay(const std::vector<double>& t, const std::vector<cd>& y) {
  if (t.size() != y.size() || t.size() < 2)
    throw std::invalid_argument("fit_decay: need matching series with >= 2 points");
  std::vector<double> lt, lm, ph;
  double prev = 0.0;
  bool first = true;
  for (size_t k = 0; k < t.size(); ++k) {
    const double m = std::abs(y[k]);
    if (m <= 0.0) continue;
    double a = std::arg(y[k]);
    if (!first) {
      while (a - prev > M_PI) a -= 2.0 * M_PI;
      while (a - prev < -M_PI) a += 2.0 * M_PI;
    }
    first = false;
    prev = a;
    lt.push_back(t[k]);
    lm.push_back(std::log(m));
    ph.push_back(a);
  }
  if (lt.size() < 2) throw std::invalid_argument("fit_decay: series is identically zero");
  auto slope = [&](const std::vector<double>& v) {
    double tm = 0.0, vm = 0.0;
    for (size_t k = 0; k < lt.size(); ++k) {
      tm += lt[k];
      vm += v[k];
    }
    tm /= lt.size();
    vm /= lt.size();
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < lt.size(); ++k) {
      num += (lt[k] - tm) * (v[k] - vm);
      den += (lt[k] - tm) * (lt[k] - tm);
    }
    return num / den;
  };
  return cd(slope(lm), slope(ph));
}

void write_snapshot(const GridField& f, double t, const std::string& path_base) {
  std::ofstream bin(path_base + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + path_base + ".bin for writing");
  for (const cd& v : f.a) {
    const double re = v.real(), im = v.imag();
    bin.write(reinterpret_cast<const char*>(&re), sizeof re);
    bin.write(reinterpret_cast<const char*>(&im), sizeof im);
  }
  if (!bin) throw std::runtime_error("short write on " + path_base + ".bin");
  bin.close();
  nlohmann::ordered_json hdr;
  hdr["n_x"] = f.gx.n;
  hdr["l_x"] = f.gx.l;
  hdr["n_d"] = f.gd.n;
  hdr["l_d"] = f.gd.l;
  hdr["t"] = t;
  hdr["layout"] = "row-major x-major, complex interleaved re,im doubles";
  std::ofstream js(path_base + ".json");
  if (!js) throw std::runtime_error("cannot open " + path_base + ".json for writing");
  js << hdr.dump(2) << "\n";
}

GridField read_snapshot(const std::string& path_base, double* t_out) {
  std::ifstream js(path_base + ".json");
  if (!js) throw std::runtime_error("cannot open " + path_base + ".json");
  nlohmann::json hdr = nlohmann::json::parse(js);
  GridField f;
  f.gx.n = hdr.at("n_x").get<int>();
  f.gx.l = hdr.at("l_x").get<double>();
  f.gd.n = hdr.at("n_d").get<int>();
  f.gd.l = hdr.at("l_d").get<double>();
  if (t_out) *t_out = hdr.at("t").get<double>();
  f.a.resize(static_cast<size_t>(f.gx.n) * f.gd.n);
  std::ifstream bin(path_base + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + path_base + ".bin");
  for (cd& v : f.a) {
    double re = 0.0, im = 0.0;
    bin.read(reinterpret_cast<char*>(&re), sizeof re);
    bin.read(reinterpret_cast<char*>(&im), sizeof im);
    v = cd(re, im);
  }
  if (!bin) throw std::runtime_error("snapshot data truncated in " + path_base + ".bin");
  return f;
}

}  // namespace oho

// command-line driver: every library operation behind a subcommand, with
// JSON summaries (stdout + file) and CSV series for the longer runs
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oho/analysis.hpp"
#include "oho/diffop.hpp"
#include "oho/gauss.hpp"
#include "oho/grid.hpp"
#include "oho/ladder.hpp"
#include "oho/moments.hpp"
#include "oho/params.hpp"
#include "oho/report.hpp"

namespace {

using namespace oho;

constexpr int kOk = 0;
constexpr int kValidationFailure = 2;
constexpr int kResidualFailure = 3;
constexpr int kUnknownCommand = 4;
constexpr int kBadConfig = 5;
constexpr int kIoFailure = 6;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  ModelParams p;
  std::string out;
  bool plot = false;
};

const double kInf = std::numeric_limits<double>::infinity();

ModelParams params_from_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  static const std::vector<std::string> known = {"nu", "d0", "d2", "beta", "m", "omega", "hbar"};
  for (const auto& [key, val] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown config key: " + key);
    if (!val.is_number()) throw ConfigError("config key must be a number: " + key);
  }
  const bool dim = j.contains("m") || j.contains("omega") || j.contains("hbar");
  if (dim) {
    if (!(j.contains("m") && j.contains("omega") && j.contains("hbar")))
      throw ConfigError("dimensional config needs all of m, omega, hbar");
    DimensionalInputs d;
    d.m = j["m"];
    d.omega = j["omega"];
    d.hbar = j["hbar"];
    d.nu_raw = j.value("nu", 1.0);
    d.d0_raw = j.value("d0", 1.0);
    d.d2_raw = j.value("d2", 1.0);
    d.beta_raw = j.value("beta", 0.0);
    try {
      return nondimensionalize(d);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  ModelParams p;
  p.nu = j.value("nu", 1.0);
  p.d0 = j.value("d0", 1.0);
  p.d2 = j.value("d2", 1.0);
  p.beta = j.value("beta", 0.0);
  return p;
}

// files go to --out if given, else $OHO_OUT_DIR, else the working directory
std::string resolve_out_dir(const std::string& flag_value, bool flag_set) {
  if (flag_set) return flag_value;
  if (const char* env = std::getenv("OHO_OUT_DIR"); env && *env) return env;
  return ".";
}

void emit_json(const Common& c, const std::string& name, const json& j) {
  try {
    ensure_dir(c.out);
    write_json(j, c.out + "/" + name + ".json");
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
  std::cout << j.dump(2) << "\n";
}

template <class Fill>
void emit_csv(const Common& c, const std::string& name, const std::vector<std::string>& header,
              Fill fill) {
  try {
    ensure_dir(c.out);
    CsvWriter w(c.out + "/" + name + ".csv", header);
    fill(w);
  } catch (const std::logic_error&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

void emit_plot_description(const Common& c, const std::string& name, const std::string& csv,
                           const std::string& x_col, const std::vector<std::string>& series,
                           const std::string& xlabel, const std::string& ylabel,
                           const std::string& title) {
  if (!c.plot) return;
  json j;
  j["file"] = csv + ".csv";
  j["x"] = x_col;
  j["series"] = series;
  j["xlabel"] = xlabel;
  j["ylabel"] = ylabel;
  j["title"] = title;
  try {
    write_json(j, c.out + "/" + name + ".plot.json");
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

// shared JSON preamble: resolved parameters plus the lambda pairing in use
// (null when no ladder set is constructible, e.g. at the degenerate point)
json preamble(const std::string& command, const ModelParams& p) {
  json j;
  j["command"] = command;
  j["parameters"] = to_json(p);
  try {
    j["lambda_pairing"] = to_json(make_ladders(p).pairing);
  } catch (const std::exception&) {
    j["lambda_pairing"] = nullptr;
  }
  return j;
}

int require_valid(const Common& c, const std::string& command) {
  ValidationReport rep = validate(c.p);
  if (rep.ok()) return kOk;
  json j;
  j["command"] = command;
  j["parameters"] = to_json(c.p);
  j["lambda_pairing"] = nullptr;
  j["validation"] = to_json(rep);
  emit_json(c, command, j);
  return kValidationFailure;
}

// ---------------------------------------------------------------- commands

int cmd_validate(const Common& c) {
  ValidationReport rep = validate(c.p);
  json j;
  j["command"] = "validate";
  j["parameters"] = to_json(c.p);
  if (rep.ok()) {
    try {
      j["lambda_pairing"] = to_json(make_ladders(c.p).pairing);
    } catch (const std::exception&) {
      j["lambda_pairing"] = nullptr;
    }
  } else {
    j["lambda_pairing"] = nullptr;
  }
  j["validation"] = to_json(rep);
  j["generator_ok"] = generator_ok(c.p);
  emit_json(c, "validate", j);
  return rep.ok() ? kOk : kValidationFailure;
}

int cmd_scales(const Common& c) {
  if (int rc = require_valid(c, "scales")) return rc;
  ScalesReport r = derived_scales(c.p);
  json j = preamble("scales", c.p);
  j["scales"] = to_json(r);
  emit_json(c, "scales", j);
  return kOk;
}

int cmd_relaxed(const Common& c) {
  if (int rc = require_valid(c, "relaxed")) return rc;
  const ModelParams& p = c.p;
  GaussPolyState st = relaxed_state(p);
  BSet bs = b_operators(p);
  json j = preamble("relaxed", p);
  json ex;
  ex["q"] = p.q_exp();
  ex["r"] = p.r_exp();
  ex["sigma"] = p.sigma_exp();
  j["exponents"] = ex;
  json pr;  // the commonly quoted squared widths; r differs from R2/2 in general
  pr["Q2"] = p.q_exp();
  pr["R2"] = p.s() / (2.0 * p.nu) + 2.0 * p.d0 * p.d2 * p.nu / p.s() - p.beta;
  pr["S2"] = 2.0 * p.d2 * p.nu / p.s();
  j["printed"] = pr;
  j["x2p2"] = p.x2p2();
  j["energy"] = 0.5 * (p.s() / (2.0 * p.nu) + p.x2p2());
  j["lognorm"] = st.logc.real();
  j["n00"] = bs.n00;
  j["trace"] = to_json(trace(st));
  emit_json(c, "relaxed", j);
  return kOk;
}

int cmd_spectrum(const Common& c) {
  if (int rc = require_valid(c, "spectrum")) return rc;
  Spectrum sp = make_spectrum(c.p.nu);
  json j = preamble("spectrum", c.p);
  json s;
  s["omega_nu"] = to_json(sp.omega);
  s["z"] = to_json(sp.z);
  s["N_minus"] = to_json(sp.Nminus);
  s["degenerate"] = sp.degenerate;
  json lam;
  lam["+,+"] = to_json(sp.lambda(+1, +1));
  lam["+,-"] = to_json(sp.lambda(+1, -1));
  lam["-,+"] = to_json(sp.lambda(-1, +1));
  lam["-,-"] = to_json(sp.lambda(-1, -1));
  s["lambda"] = lam;
  j["spectrum"] = s;
  emit_json(c, "spectrum", j);
  return kOk;
}

json op_coeffs_json(const DiffOp& op) {
  cd constant;
  Eigen::Vector4cd u = coeff_vec(op, &constant);
  json j;
  j["x"] = to_json(u(0));
  j["p"] = to_json(u(1));
  j["xd"] = to_json(u(2));
  j["pd"] = to_json(u(3));
  j["const"] = to_json(constant);
  return j;
}

int cmd_ladders(const Common& c) {
  if (int rc = require_valid(c, "ladders")) return rc;
  LadderSet ls = make_ladders(c.p);
  json j = preamble("ladders", c.p);
  json ops;
  ops["a_plus"] = op_coeffs_json(ls.a_p);
  ops["a_minus"] = op_coeffs_json(ls.a_m);
  ops["abar_plus"] = op_coeffs_json(ls.ab_p);
  ops["abar_minus"] = op_coeffs_json(ls.ab_m);
  j["operators"] = ops;
  j["T"] = matrix_json(ls.T);
  Eigen::Matrix4cd tp = printed_T(c.p);
  const double mismatch = (tp - ls.T).cwiseAbs().maxCoeff();
  j["printed_T"] = matrix_json(tp);
  j["printed_T_mismatch"] = mismatch;
  j["detS"] = to_json(ls.detS);
  const double det_err = std::abs(ls.detS - cd(1.0));
  j["detS_error"] = det_err;
  emit_json(c, "ladders", j);
  return (mismatch <= 1e-12 && det_err <= 1e-12) ? kOk : kResidualFailure;
}

int cmd_verify_algebra(const Common& c, std::uint64_t seed, int draws) {
  AlgebraSweep sw = run_algebra_sweep(seed, draws);
  json j = preamble("verify-algebra", c.p);
  j["seed"] = seed;
  j["draws"] = sw.draws;
  json r;
  r["max_commutator_residual"] = sw.max_comm_residual;
  r["max_eigen_relation_residual"] = sw.max_eigen_residual;
  r["max_annihilation_residual"] = sw.max_annihilation;
  r["max_T_mismatch"] = sw.max_T_mismatch;
  r["max_detS_error"] = sw.max_detS_err;
  r["max_diagonal_form_residual"] = sw.max_diag_residual;
  j["residuals"] = r;
  const bool ok = sw.ok(1e-12);
  j["all_below_1e-12"] = ok;
  emit_json(c, "verify-algebra", j);
  return ok ? kOk : kResidualFailure;
}

int cmd_evolve_moments(const Common& c, double t_final, double dt, double x0, double p0,
                       double sxx0, double sxp0, double spp0) {
  if (int rc = require_valid(c, "evolve-moments")) return rc;
  MomentSystem ms = derive_moment_system(c.p);
  Eigen::Vector2d m0;
  m0 << x0, p0;
  Eigen::Matrix2d S0 = ms.Sigma_inf;
  if (std::isfinite(sxx0)) S0(0, 0) = sxx0;
  if (std::isfinite(sxp0)) S0(0, 1) = S0(1, 0) = sxp0;
  if (std::isfinite(spp0)) S0(1, 1) = spp0;
  MomentTrajectory tr = integrate_moments(ms, m0, S0, t_final, dt);

  json j = preamble("evolve-moments", c.p);
  j["drift_matrix"] = matrix_json(ms.A);
  j["diffusion_matrix"] = matrix_json(ms.D);
  j["stationary_covariance"] = matrix_json(ms.Sigma_inf);
  j["drift_eigenvalues"] = json::array({to_json(ms.eigenvalues(0)), to_json(ms.eigenvalues(1))});
  j["stationary_energy"] = ms.energy_inf;
  j["probe_residuals"] =
      json::object({{"drift", ms.drift_residual}, {"diffusion", ms.diffusion_residual}});
  j["t_final"] = t_final;
  j["dt"] = dt;
  j["final"] = json::object({{"x_mean", tr.x_mean.back()},
                             {"p_mean", tr.p_mean.back()},
                             {"x2", tr.x2.back()},
                             {"p2", tr.p2.back()},
                             {"energy", tr.energy.back()}});
  emit_json(c, "evolve-moments", j);
  emit_csv(c, "evolve-moments",
           {"t", "x_mean", "p_mean", "x2", "p2", "energy"}, [&](CsvWriter& w) {
             for (size_t k = 0; k < tr.t.size(); ++k)
               w.row({tr.t[k], tr.x_mean[k], tr.p_mean[k], tr.x2[k], tr.p2[k], tr.energy[k]});
           });
  emit_plot_description(c, "evolve-moments", "evolve-moments", "t",
                        {"x_mean", "p_mean", "x2", "p2", "energy"}, "t (dimensionless)",
                        "observable (dimensionless)", "first and second moments vs time");
  return kOk;
}

int cmd_evolve_grid(const Common& c, int n, double l, double t_final, const std::string& state,
                    double w_re, double w_im, int sample_every, double dt_in, bool snapshot) {
  if (int rc = require_valid(c, "evolve-grid")) return rc;
  GridSpec gx{n, l}, gd{n, l};
  GridGenerator g(c.p, gx, gd);

  GridField f0;
  std::optional<LadderSet> ls;
  GridField ref;  // mode-projection reference for state=mode11
  double ref_norm = 0.0;
  if (state == "relaxed") {
    f0 = sample_state(relaxed_state(c.p), gx, gd);
  } else if (state == "mode11") {
    ls = make_ladders(c.p);
    f0 = sample_state(ladder_state_a(*ls, 1, 1), gx, gd);
    ref = f0;
    for (const cd& v : ref.a) ref_norm += std::norm(v);
  } else if (state == "coherent") {
    ls = make_ladders(c.p);
    const cd w(w_re, w_im);
    f0 = sample_state(coherent_w(*ls, w, std::conj(w)), gx, gd);
  } else {
    throw std::invalid_argument("unknown state: " + state + " (relaxed|mode11|coherent)");
  }
  const GridField f_init = f0;

  // moments are sampled every sample_every steps plus the final state,
  // matching the cadence of the reference measurements
  const double dt_plan = dt_in > 0.0 ? dt_in : 0.2 * gx.h() * gx.h() / (1.0 + c.p.d2);
  const int steps_plan =
      t_final > 0.0 ? static_cast<int>(std::ceil(t_final / dt_plan - 1e-12)) : 0;
  struct Row {
    double t, trace_re, x_mean, p_mean, x2, p2, energy, amp_re, amp_im;
  };
  std::vector<Row> rows;
  int call = 0;
  EvolveOptions opt;
  opt.dt = dt_in;
  opt.observer = [&](double t, const GridField& f) {
    const bool final_call = call == steps_plan;
    if ((call % sample_every == 0 && !final_call) || final_call) {
      Row r;
      r.t = t;
      r.trace_re = grid_trace(f).real();
      r.x_mean = grid_moment_x(f, 1).real();
      r.p_mean = grid_p1(f, PConvention::full).real();
      r.x2 = grid_moment_x(f, 2).real();
      r.p2 = grid_p2(f, PConvention::full).real();
      r.energy = 0.5 * (r.x2 + r.p2);
      r.amp_re = r.amp_im = 0.0;
      if (ref_norm > 0.0) {
        cd amp = 0.0;
        for (size_t k = 0; k < f.a.size(); ++k) amp += std::conj(ref.a[k]) * f.a[k];
        amp /= ref_norm;
        r.amp_re = amp.real();
        r.amp_im = amp.imag();
      }
      rows.push_back(r);
    }
    ++call;
  };
  EvolveResult er = evolve(g, std::move(f0), t_final, opt);

  double stationarity = 0.0, sup0 = 0.0;
  for (size_t k = 0; k < er.f.a.size(); ++k) {
    stationarity = std::max(stationarity, std::abs(er.f.a[k] - f_init.a[k]));
    sup0 = std::max(sup0, std::abs(f_init.a[k]));
  }

  json j = preamble("evolve-grid", c.p);
  j["grid"] = json::object({{"n", n}, {"l", l}, {"h", gx.h()}});
  j["state"] = state;
  if (state == "coherent") j["w"] = to_json(cd(w_re, w_im));
  j["t_final"] = t_final;
  j["dt"] = er.dt;
  j["steps"] = er.steps;
  j["trace_drift"] = er.trace_drift;
  j["max_boundary_ratio"] = er.max_boundary;
  j["relative_drift_from_initial"] = stationarity / sup0;

  if (state == "mode11" && rows.size() >= 4) {
    std::vector<double> ts;
    std::vector<cd> amps;
    for (const Row& r : rows) {
      ts.push_back(r.t);
      amps.push_back(cd(r.amp_re, r.amp_im));
    }
    const cd fit = fit_decay(ts, amps);
    j["mode_decay"] =
        json::object({{"rate", fit.real()}, {"phase_rate", fit.imag()}});
  }
  if (state == "coherent" && rows.size() >= 16 && ls) {
    std::vector<double> ts, xs;
    for (const Row& r : rows) {
      ts.push_back(r.t);
      xs.push_back(r.x_mean);
    }
    const cd fit = fit_ringdown(ts, xs, c.p.nu, ls->spec.omega.real());
    j["ringdown"] =
        json::object({{"envelope_rate", fit.real()}, {"phase_rate", fit.imag()}});
  }
  emit_json(c, "evolve-grid", j);

  const bool mode_cols = state == "mode11";
  std::vector<std::string> header = {"t", "trace_re", "x_mean", "p_mean", "x2", "p2", "energy"};
  if (mode_cols) {
    header.push_back("mode_amp_re");
    header.push_back("mode_amp_im");
  }
  emit_csv(c, "evolve-grid", header, [&](CsvWriter& w) {
    for (const Row& r : rows) {
      std::vector<double> row = {r.t, r.trace_re, r.x_mean, r.p_mean, r.x2, r.p2, r.energy};
      if (mode_cols) {
        row.push_back(r.amp_re);
        row.push_back(r.amp_im);
      }
      w.row(row);
    }
  });
  emit_plot_description(c, "evolve-grid", "evolve-grid", "t", {"x_mean", "p_mean", "energy"},
                        "t (dimensionless)", "observable (dimensionless)",
                        "grid evolution observables");
  if (snapshot) {
    try {
      write_snapshot(er.f, t_final, c.out + "/evolve-grid-final");
    } catch (const std::runtime_error& e) {
      throw IoError(e.what());
    }
  }
  return kOk;
}

int cmd_decohere(const Common& c, const DecoherenceQuery& q, bool with_grid, int n, double l) {
  if (int rc = require_valid(c, "decohere")) return rc;
  LadderSet ls = make_ladders(c.p);
  const double closed = decohere_closed(ls, q);
  const double weyl = decohere_weyl(ls, q);
  const double d_cw = std::abs(closed - weyl);

  json j = preamble("decohere", c.p);
  j["query"] = json::object({{"w", to_json(q.w)},
                             {"z_obs", q.z_obs},
                             {"z_prep", q.z_prep},
                             {"dz", q.dz},
                             {"t_prep", q.t_prep},
                             {"t_obs", q.t_obs}});
  j["closed"] = closed;
  j["weyl"] = weyl;
  j["closed_weyl_delta"] = d_cw;
  bool ok = d_cw <= 1e-10;
  if (with_grid) {
    GridSpec gx{n, l}, gd{n, l};
    const double grid = decohere_grid(c.p, q, gx, gd);
    const double d_gw = std::abs(grid - weyl);
    j["grid"] = grid;
    j["grid_weyl_delta"] = d_gw;
    j["grid_n"] = n;
    j["grid_l"] = l;
    ok = ok && d_gw <= 1e-3;
  }
  j["within_tolerance"] = ok;
  emit_json(c, "decohere", j);
  return ok ? kOk : kResidualFailure;
}

int cmd_thermal(const Common& c) {
  if (int rc = require_valid(c, "thermal")) return rc;
  ThermalReport r = thermal_report(c.p);
  json j = preamble("thermal", c.p);
  json t;
  t["Q"] = r.Q;
  t["R"] = r.R;
  t["kappa"] = r.kappa;
  t["ellT2_printed"] = r.ellT2_printed;
  t["ellT2_matched"] = r.ellT2_matched;
  t["beta_omega_printed"] = r.beta_omega_printed;
  t["beta_omega_matched"] = r.beta_omega_matched;
  t["gibbs_distance"] = r.gibbs_distance;
  t["ell_dec_rho"] = r.ell_dec_rho;
  switch (r.cls) {
    case StateClass::pure_ground: t["class"] = "pure_ground"; break;
    case StateClass::thermal: t["class"] = "thermal"; break;
    case StateClass::non_thermal: t["class"] = "non_thermal"; break;
  }
  j["thermal"] = t;
  emit_json(c, "thermal", j);
  return kOk;
}

int cmd_scan_weak(const Common& c, double kappa, std::vector<double> gs) {
  if (gs.empty()) gs = {1e-1, 1e-2, 1e-3};
  std::vector<WeakCouplingRow> rows = scan_weak_coupling(kappa, gs);
  json j;
  j["command"] = "scan-weak";
  ModelParams pref;
  pref.nu = gs.front() * gs.front() * kappa;
  pref.d0 = pref.d2 = gs.front() * gs.front() * 0.5;
  pref.beta = 0.0;
  j["parameters"] = json::object({{"kappa", kappa}, {"g", gs}});
  try {
    j["lambda_pairing"] = to_json(make_ladders(pref).pairing);
  } catch (const std::exception&) {
    j["lambda_pairing"] = nullptr;
  }
  json arr = json::array();
  for (const auto& r : rows) {
    json row;
    row["g"] = r.g;
    row["Q2"] = r.Q2;
    row["R2"] = r.R2;
    row["beta_omega"] = r.beta_omega;
    row["beta_omega_err"] = r.beta_omega_err;
    row["ladder_distance"] = r.ladder_distance;
    row["energy"] = r.energy;
    arr.push_back(row);
  }
  j["rows"] = arr;
  j["beta_omega_limit"] =
      kappa < 1.0 ? json(std::log((1.0 + kappa) / (1.0 - kappa))) : json(nullptr);
  emit_json(c, "scan-weak", j);
  emit_csv(c, "scan-weak",
           {"g", "Q2", "R2", "beta_omega", "beta_omega_err", "ladder_distance", "energy"},
           [&](CsvWriter& w) {
             for (const auto& r : rows)
               w.row({r.g, r.Q2, r.R2, r.beta_omega, r.beta_omega_err, r.ladder_distance,
                      r.energy});
           });
  emit_plot_description(c, "scan-weak", "scan-weak", "g", {"beta_omega_err", "ladder_distance"},
                        "coupling g (dimensionless)", "deviation from closed limit",
                        "weak-coupling convergence");
  return kOk;
}

int cmd_scan_critical(const Common& c, int points_per_decade) {
  CriticalScanResult r = scan_critical(points_per_decade);
  json j;
  j["command"] = "scan-critical";
  j["parameters"] = json::object({{"points_per_decade", points_per_decade}});
  j["lambda_pairing"] = nullptr;  // the scan spans both sides of the degenerate point
  j["exponent_below"] = r.exponent_below;
  j["exponent_above"] = r.exponent_above;
  j["classical_sup_gap"] = r.sup_gap;
  json ws = json::array();
  for (size_t k = 0; k < r.wscale_nu.size(); ++k)
    ws.push_back(json::object({{"nu", r.wscale_nu[k]}, {"x1", r.wscale_x1[k]}}));
  j["scaled_label_x1"] = ws;
  emit_json(c, "scan-critical", j);
  emit_csv(c, "scan-critical", {"delta", "z2_below", "z2_above"}, [&](CsvWriter& w) {
    for (size_t k = 0; k < r.delta.size(); ++k)
      w.row({r.delta[k], r.z2_below[k], r.z2_above[k]});
  });
  emit_plot_description(c, "scan-critical", "scan-critical", "delta", {"z2_below", "z2_above"},
                        "|2 - nu| (dimensionless)", "|z|^2",
                        "normalization blow-up near the degenerate point");
  return kOk;
}

int cmd_classical(const Common& c, double xi, double pim, double t_final, int samples) {
  if (samples < 2) throw std::invalid_argument("classical: need at least 2 samples");
  if (!(c.p.nu >= 0.0) || !std::isfinite(c.p.nu))
    throw std::invalid_argument("classical: nu must be finite and >= 0");
  std::vector<double> ts(samples), xs(samples);
  double sup = 0.0;
  for (int k = 0; k < samples; ++k) {
    ts[k] = t_final * k / (samples - 1);
    xs[k] = classical_x(xi, pim, c.p.nu, ts[k]);
    sup = std::max(sup, std::abs(xs[k]));
  }
  json j = preamble("classical", c.p);
  j["xi"] = xi;
  j["pim"] = pim;
  j["t_final"] = t_final;
  j["samples"] = samples;
  j["x_final"] = xs.back();
  j["sup_abs"] = sup;
  emit_json(c, "classical", j);
  emit_csv(c, "classical", {"t", "x"}, [&](CsvWriter& w) {
    for (int k = 0; k < samples; ++k) w.row({ts[k], xs[k]});
  });
  emit_plot_description(c, "classical", "classical", "t", {"x"}, "t (dimensionless)",
                        "x (dimensionless)", "classical mean-position trajectory");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"damped-oscillator toolbox: generator algebra, stationary state, grid evolution,"
               " decoherence, and parameter scans"};
  app.require_subcommand(1);

  ModelParams flags;
  std::string config_path, out_flag;
  bool plot = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--nu", flags.nu, "friction coefficient (dimensionless)");
    sub->add_option("--d0", flags.d0, "decoherence strength (dimensionless)");
    sub->add_option("--d2", flags.d2, "derivative decoherence strength (dimensionless)");
    sub->add_option("--beta", flags.beta, "static recoherence (dimensionless)");
    sub->add_option("--config", config_path, "JSON parameter file (keys nu,d0,d2,beta,m,omega,hbar)");
    sub->add_option("--out", out_flag, "output directory (default: $OHO_OUT_DIR or .)");
    sub->add_flag("--plot-description", plot, "emit a plot-description JSON next to each CSV");
  };

  // per-command options
  std::uint64_t seed = 7;
  int draws = 100;
  double t_final = 5.0, dt = 0.0;
  double x0 = 1.0, p0 = 0.0;
  double sxx0 = std::nan(""), sxp0 = std::nan(""), spp0 = std::nan("");
  int grid_n = 128;
  double grid_l = 8.0;
  std::string state = "relaxed";
  double w_re = 0.5, w_im = 0.0;
  int sample_every = 50;
  bool snapshot = false;
  double z_obs = 0.0, z_prep = 0.0, dz = kInf, t_prep = 0.0, t_obs = 0.0;
  bool dec_grid = false;
  int dec_n = 384;
  double dec_l = 8.0;
  double kappa = 0.5;
  std::vector<double> gs;
  int ppd = 10;
  double xi = 1.0, pim = 0.0;
  int samples = 501;
  double mdt = 0.01, mt_final = 10.0;

  CLI::App* s_validate = app.add_subcommand("validate", "check parameters and report findings");
  add_common(s_validate);
  CLI::App* s_scales = app.add_subcommand("scales", "derived length and time scales");
  add_common(s_scales);
  CLI::App* s_relaxed = app.add_subcommand("relaxed", "stationary-state exponents and moments");
  add_common(s_relaxed);
  CLI::App* s_spectrum = app.add_subcommand("spectrum", "normal frequencies and ladder spectrum");
  add_common(s_spectrum);
  CLI::App* s_ladders = app.add_subcommand("ladders", "ladder operators and the T matrix");
  add_common(s_ladders);

  CLI::App* s_verify = app.add_subcommand("verify-algebra", "randomized operator-algebra sweep");
  add_common(s_verify);
  s_verify->add_option("--seed", seed, "RNG seed");
  s_verify->add_option("--draws", draws, "number of random parameter draws");

  CLI::App* s_moments = app.add_subcommand("evolve-moments", "integrate the moment ODE system");
  add_common(s_moments);
  s_moments->add_option("--t-final", mt_final, "integration time");
  s_moments->add_option("--dt", mdt, "RK4 step");
  s_moments->add_option("--x0", x0, "initial mean position");
  s_moments->add_option("--p0", p0, "initial mean momentum");
  s_moments->add_option("--sxx0", sxx0, "initial Sigma_xx (default: stationary)");
  s_moments->add_option("--sxp0", sxp0, "initial Sigma_xp (default: stationary)");
  s_moments->add_option("--spp0", spp0, "initial Sigma_pp (default: stationary)");

  CLI::App* s_grid = app.add_subcommand("evolve-grid", "finite-difference evolution of the kernel");
  add_common(s_grid);
  s_grid->add_option("--n", grid_n, "grid points per axis");
  s_grid->add_option("--l", grid_l, "half width of the square domain");
  s_grid->add_option("--t-final", t_final, "integration time");
  s_grid->add_option("--dt", dt, "RK4 step (0: auto)");
  s_grid->add_option("--state", state, "initial state: relaxed|mode11|coherent");
  s_grid->add_option("--w-re", w_re, "coherent label, real part");
  s_grid->add_option("--w-im", w_im, "coherent label, imaginary part");
  s_grid->add_option("--sample-every", sample_every, "observer cadence in steps");
  s_grid->add_flag("--snapshot", snapshot, "write the final field as binary + metadata");

  CLI::App* s_dec = app.add_subcommand("decohere", "readout suppression factor for one query");
  add_common(s_dec);
  s_dec->add_option("--w-re", w_re, "preparation label, real part");
  s_dec->add_option("--w-im", w_im, "preparation label, imaginary part");
  s_dec->add_option("--z-obs", z_obs, "observation off-diagonality")->required();
  s_dec->add_option("--z-prep", z_prep, "preparation filter center");
  s_dec->add_option("--dz", dz, "preparation filter width (inf: no filter)");
  s_dec->add_option("--t-prep", t_prep, "preparation time");
  s_dec->add_option("--t-obs", t_obs, "absolute readout time (>= t-prep)");
  s_dec->add_flag("--grid", dec_grid, "also evaluate on the finite-difference grid");
  s_dec->add_option("--n", dec_n, "grid points per axis for --grid");
  s_dec->add_option("--l", dec_l, "half width for --grid");

  CLI::App* s_thermal = app.add_subcommand("thermal", "effective-temperature match of the stationary state");
  add_common(s_thermal);

  CLI::App* s_weak = app.add_subcommand("scan-weak", "weak-coupling limit scan at fixed kappa");
  add_common(s_weak);
  s_weak->add_option("--kappa", kappa, "nu/(d0+d2), held fixed along the scan");
  s_weak->add_option("--g", gs, "coupling values (repeatable; default 1e-1 1e-2 1e-3)");

  CLI::App* s_crit = app.add_subcommand("scan-critical", "scaling scan around the degenerate point");
  add_common(s_crit);
  s_crit->add_option("--points-per-decade", ppd, "sampling density of |2-nu|");

  CLI::App* s_classical = app.add_subcommand("classical", "mean-position trajectory");
  add_common(s_classical);
  s_classical->add_option("--xi", xi, "initial position");
  s_classical->add_option("--pim", pim, "initial momentum over mass");
  s_classical->add_option("--t-final", t_final, "trajectory length");
  s_classical->add_option("--samples", samples, "number of samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUnknownCommand;
  }

  Common common;
  try {
    if (!config_path.empty()) {
      common.p = params_from_config(config_path);
      // explicit flags override config values
      CLI::App* sub = app.get_subcommands().front();
      if (sub->count("--nu")) common.p.nu = flags.nu;
      if (sub->count("--d0")) common.p.d0 = flags.d0;
      if (sub->count("--d2")) common.p.d2 = flags.d2;
      if (sub->count("--beta")) common.p.beta = flags.beta;
    } else {
      common.p = flags;
    }
    CLI::App* sub = app.get_subcommands().front();
    common.out = resolve_out_dir(out_flag, sub->count("--out") > 0);
    common.plot = plot;

    if (sub == s_validate) return cmd_validate(common);
    if (sub == s_scales) return cmd_scales(common);
    if (sub == s_relaxed) return cmd_relaxed(common);
    if (sub == s_spectrum) return cmd_spectrum(common);
    if (sub == s_ladders) return cmd_ladders(common);
    if (sub == s_verify) return cmd_verify_algebra(common, seed, draws);
    if (sub == s_moments)
      return cmd_evolve_moments(common, mt_final, mdt, x0, p0, sxx0, sxp0, spp0);
    if (sub == s_grid)
      return cmd_evolve_grid(common, grid_n, grid_l, t_final, state, w_re, w_im, sample_every,
                             dt, snapshot);
    if (sub == s_dec) {
      DecoherenceQuery q{cd(w_re, w_im), z_obs, z_prep, dz, t_prep, t_obs};
      return cmd_decohere(common, q, dec_grid, dec_n, dec_l);
    }
    if (sub == s_thermal) return cmd_thermal(common);
    if (sub == s_weak) return cmd_scan_weak(common, kappa, gs);
    if (sub == s_crit) return cmd_scan_critical(common, ppd);
    if (sub == s_classical) return cmd_classical(common, xi, pim, t_final, samples);
    std::cerr << "unknown command\n";
    return kUnknownCommand;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kBadConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid request: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return kResidualFailure;
  }
}

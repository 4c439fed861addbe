#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using njson = nlohmann::json;

// driver binary under test, injected by the build
static const std::string kCli = OHO_CLI_PATH;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

static fs::path fresh_dir(const std::string& tag) {
  fs::path d = fs::temp_directory_path() / ("oho_cli_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

static RunResult run(const std::string& args, const std::string& tag) {
  fs::path cap = fs::temp_directory_path() / ("oho_cli_cap_" + tag + ".txt");
  std::string cmd = kCli + " " + args + " > " + cap.string() + " 2>&1";
  int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(cap);
  std::ostringstream os;
  os << in.rdbuf();
  r.out = os.str();
  return r;
}

static njson load_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  njson j;
  in >> j;
  return j;
}

static std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

TEST_CASE("spectrum reports the damped frequency") {
  fs::path d = fresh_dir("spectrum");
  RunResult r = run("spectrum --nu 1.0 --out " + d.string(), "spectrum");
  CHECK(r.exit_code == 0);
  njson j = load_json(d / "spectrum.json");
  CHECK(j["spectrum"]["omega_nu"][0].get<double>() == doctest::Approx(0.8660254037844386));
  CHECK(j["spectrum"]["omega_nu"][1].get<double>() == 0.0);
  CHECK(j["parameters"]["nu"].get<double>() == 1.0);
  // stdout carries the same document
  CHECK(r.out.find("0.866025") != std::string::npos);
}

TEST_CASE("relaxed reports the advertised squared widths") {
  fs::path d = fresh_dir("relaxed");
  RunResult r = run("relaxed --nu 1 --d0 1 --d2 1 --beta 0 --out " + d.string(), "relaxed");
  CHECK(r.exit_code == 0);
  njson j = load_json(d / "relaxed.json");
  CHECK(j["printed"]["Q2"].get<double>() == doctest::Approx(1.0));
  CHECK(j["printed"]["R2"].get<double>() == doctest::Approx(2.0));
  CHECK(j["printed"]["S2"].get<double>() == doctest::Approx(1.0));
  CHECK(j["lambda_pairing"].is_object());
  CHECK(j["lambda_pairing"]["diag_residual"].get<double>() < 1e-12);
}

TEST_CASE("verify-algebra passes the randomized sweep") {
  fs::path d = fresh_dir("verify");
  RunResult r = run("verify-algebra --seed 7 --draws 100 --out " + d.string(), "verify");
  CHECK(r.exit_code == 0);
  njson j = load_json(d / "verify-algebra.json");
  CHECK(j["all_below_1e-12"].get<bool>());
  CHECK(j["draws"].get<int>() == 100);
}

TEST_CASE("validation failure exits 2 and reports the findings") {
  fs::path d = fresh_dir("badparam");
  RunResult r = run("relaxed --nu -1 --out " + d.string(), "badparam");
  CHECK(r.exit_code == 2);
  njson j = load_json(d / "relaxed.json");
  CHECK(!j["validation"]["ok"].get<bool>());
  CHECK(!j["validation"]["hard_errors"].empty());
}

TEST_CASE("compute-stage rejection also exits 2") {
  fs::path d = fresh_dir("badquery");
  RunResult r =
      run("decohere --z-obs 0.5 --t-prep 1.0 --t-obs 0.5 --out " + d.string(), "badquery");
  CHECK(r.exit_code == 2);
}

TEST_CASE("unknown command exits 4") {
  RunResult r = run("frobnicate", "unknown");
  CHECK(r.exit_code == 4);
  RunResult r2 = run("relaxed --no-such-flag 3", "unknownflag");
  CHECK(r2.exit_code == 4);
}

TEST_CASE("malformed config exits 5") {
  fs::path d = fresh_dir("badcfg");
  fs::path cfg = d / "cfg.json";
  std::ofstream(cfg) << "not json at all";
  CHECK(run("scales --config " + cfg.string() + " --out " + d.string(), "cfg1").exit_code == 5);
  std::ofstream(cfg) << "{\"nu\": 1.0, \"bogus\": 2.0}";
  CHECK(run("scales --config " + cfg.string() + " --out " + d.string(), "cfg2").exit_code == 5);
  std::ofstream(cfg) << "{\"nu\": 1.0, \"m\": 1.0}";  // incomplete unit system
  CHECK(run("scales --config " + cfg.string() + " --out " + d.string(), "cfg3").exit_code == 5);
  std::ofstream(cfg) << "{\"nu\": \"one\"}";
  CHECK(run("scales --config " + cfg.string() + " --out " + d.string(), "cfg4").exit_code == 5);
}

TEST_CASE("unwritable output directory exits 6") {
  RunResult r = run("scales --out /proc/definitely/not/writable", "io");
  CHECK(r.exit_code == 6);
}

TEST_CASE("verification-residual failure exits 3") {
  fs::path d = fresh_dir("resid");
  // a deliberately coarse grid cannot hit the cross-check tolerance
  RunResult r = run("decohere --w-re 0.5 --z-obs 0.8 --z-prep 0.5 --dz 0.8 --t-prep 0.3 "
                    "--t-obs 0.9 --grid --n 64 --l 8 --out " + d.string(), "resid");
  CHECK(r.exit_code == 3);
  njson j = load_json(d / "decohere.json");
  CHECK(j["grid_weyl_delta"].get<double>() > 1e-3);
  CHECK_FALSE(j["within_tolerance"].get<bool>());
}

TEST_CASE("config file drives the parameters and flags override it") {
  fs::path d = fresh_dir("cfgmerge");
  fs::path cfg = d / "p.json";
  std::ofstream(cfg) << "{\"nu\": 1.3, \"d0\": 0.7, \"d2\": 1.9, \"beta\": 0.15}";
  RunResult r = run("relaxed --config " + cfg.string() + " --out " + d.string(), "cfgm1");
  CHECK(r.exit_code == 0);
  njson j = load_json(d / "relaxed.json");
  CHECK(j["parameters"]["nu"].get<double>() == doctest::Approx(1.3));
  CHECK(j["printed"]["R2"].get<double>() == doctest::Approx(2.18));
  // now override one knob on the command line
  RunResult r2 = run("relaxed --config " + cfg.string() + " --beta 0 --out " + d.string(),
                     "cfgm2");
  CHECK(r2.exit_code == 0);
  njson j2 = load_json(d / "relaxed.json");
  CHECK(j2["parameters"]["beta"].get<double>() == 0.0);
  CHECK(j2["parameters"]["nu"].get<double>() == doctest::Approx(1.3));
}

TEST_CASE("dimensional config is reduced to oscillator units") {
  fs::path d = fresh_dir("dimcfg");
  fs::path cfg = d / "dim.json";
  // omega = 2 halves the friction and quarters the position noise
  std::ofstream(cfg) << "{\"nu\": 2.0, \"d0\": 2.0, \"d2\": 2.0, \"beta\": 0.0,"
                        " \"m\": 1.0, \"omega\": 2.0, \"hbar\": 1.0}";
  RunResult r = run("validate --config " + cfg.string() + " --out " + d.string(), "dim");
  CHECK(r.exit_code == 0);
  njson j = load_json(d / "validate.json");
  CHECK(j["parameters"]["nu"].get<double>() == doctest::Approx(1.0));
  CHECK(j["parameters"]["d0"].get<double>() == doctest::Approx(0.5));
  CHECK(j["parameters"]["d2"].get<double>() == doctest::Approx(2.0));
  CHECK(j["parameters"]["dimensional_inputs"]["omega"].get<double>() == 2.0);
}

TEST_CASE("environment variable sets the default output directory") {
  fs::path d = fresh_dir("envout");
  std::string cmd = "OHO_OUT_DIR=" + d.string() + " " + kCli + " scales > /dev/null 2>&1";
  int raw = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(raw) == 0);
  CHECK(fs::exists(d / "scales.json"));
  // an explicit --out wins over the environment
  fs::path d2 = fresh_dir("envout2");
  std::string cmd2 = "OHO_OUT_DIR=" + d.string() + " " + kCli + " relaxed --out " + d2.string() +
                     " > /dev/null 2>&1";
  (void)std::system(cmd2.c_str());
  CHECK(fs::exists(d2 / "relaxed.json"));
  CHECK_FALSE(fs::exists(d / "relaxed.json"));
}

TEST_CASE("series commands write CSV files with unit-bearing headers") {
  fs::path d = fresh_dir("csv");
  RunResult r = run("classical --nu 1.0 --xi 1 --pim 0 --t-final 2 --samples 21 --out " +
                    d.string(), "csv1");
  CHECK(r.exit_code == 0);
  std::string csv = slurp(d / "classical.csv");
  CHECK(csv.rfind("t,x\n", 0) == 0);
  // 21 samples + header
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);

  RunResult r2 = run("evolve-moments --t-final 0.5 --dt 0.01 --out " + d.string(), "csv2");
  CHECK(r2.exit_code == 0);
  std::string csv2 = slurp(d / "evolve-moments.csv");
  CHECK(csv2.rfind("t,x_mean,p_mean,x2,p2,energy\n", 0) == 0);
}

TEST_CASE("plot descriptions are emitted on demand and drawing-free") {
  fs::path d = fresh_dir("plot");
  RunResult r = run("classical --nu 1.0 --t-final 1 --samples 11 --plot-description --out " +
                    d.string(), "plot");
  CHECK(r.exit_code == 0);
  njson j = load_json(d / "classical.plot.json");
  CHECK(j["file"].get<std::string>() == "classical.csv");
  CHECK(j["x"].get<std::string>() == "t");
  CHECK(j.contains("series"));
  CHECK(j.contains("xlabel"));
}

TEST_CASE("repeated runs with the same inputs are byte-identical") {
  fs::path da = fresh_dir("det_a");
  fs::path db = fresh_dir("det_b");
  const std::string tail = "verify-algebra --seed 11 --draws 25 --out ";
  RunResult ra = run(tail + da.string(), "det1");
  RunResult rb = run(tail + db.string(), "det2");
  CHECK(ra.exit_code == 0);
  CHECK(rb.exit_code == 0);
  CHECK(ra.out == rb.out);
  CHECK(slurp(da / "verify-algebra.json") == slurp(db / "verify-algebra.json"));

  const std::string tail2 = "evolve-moments --t-final 1 --dt 0.01 --x0 0.3 --out ";
  (void)run(tail2 + da.string(), "det3");
  (void)run(tail2 + db.string(), "det4");
  CHECK(slurp(da / "evolve-moments.csv") == slurp(db / "evolve-moments.csv"));
  CHECK(slurp(da / "evolve-moments.json") == slurp(db / "evolve-moments.json"));
}

TEST_CASE("scan commands publish their scaling summaries") {
  fs::path d = fresh_dir("scans");
  RunResult r = run("scan-weak --kappa 0.5 --g 0.1 --g 0.01 --out " + d.string(), "weak");
  CHECK(r.exit_code == 0);
  njson j = load_json(d / "scan-weak.json");
  REQUIRE(j["rows"].size() == 2);
  CHECK(j["rows"][1]["beta_omega_err"].get<double>() < j["rows"][0]["beta_omega_err"].get<double>());
  std::string csv = slurp(d / "scan-weak.csv");
  CHECK(csv.rfind("g,Q2,R2,beta_omega,beta_omega_err,ladder_distance,energy\n", 0) == 0);

  RunResult r2 = run("scan-critical --points-per-decade 4 --out " + d.string(), "crit");
  CHECK(r2.exit_code == 0);
  njson j2 = load_json(d / "scan-critical.json");
  CHECK(std::abs(j2["exponent_above"].get<double>() + 0.5) < 0.02);
  CHECK(std::abs(j2["exponent_below"].get<double>() + 0.5) < 0.02);
  CHECK(j2["classical_sup_gap"].get<double>() < 1e-2);
}

TEST_CASE("grid evolution publishes conserved trace and sampled moments") {
  fs::path d = fresh_dir("grid");
  RunResult r = run("evolve-grid --n 64 --l 8 --t-final 0.5 --state relaxed --sample-every 40 "
                    "--out " + d.string(), "grid");
  CHECK(r.exit_code == 0);
  njson j = load_json(d / "evolve-grid.json");
  CHECK(j["trace_drift"].get<double>() < 1e-10);
  CHECK(j["steps"].get<int>() > 0);
  std::string csv = slurp(d / "evolve-grid.csv");
  CHECK(csv.rfind("t,trace_re,x_mean,p_mean,x2,p2,energy\n", 0) == 0);
}

#include "oho/report.hpp"

#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace oho {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json to_json(const cd& z) { return json::array({z.real(), z.imag()}); }

json to_json(const ModelParams& p) {
  json j;
  j["nu"] = p.nu;
  j["d0"] = p.d0;
  j["d2"] = p.d2;
  j["beta"] = p.beta;
  if (p.dims) {
    json d;
    d["m"] = p.dims->m;
    d["omega"] = p.dims->omega;
    d["hbar"] = p.dims->hbar;
    d["nu_raw"] = p.dims->nu_raw;
    d["d0_raw"] = p.dims->d0_raw;
    d["d2_raw"] = p.dims->d2_raw;
    d["beta_raw"] = p.dims->beta_raw;
    j["dimensional_inputs"] = d;
  }
  return j;
}

json to_json(const ValidationReport& r) {
  json j;
  j["ok"] = r.ok();
  j["hard_errors"] = r.hard;
  j["warnings"] = r.warnings;
  j["lindblad_ok"] = r.lindblad_ok;
  return j;
}

json to_json(const ScalesReport& r) {
  json j;
  j["ell_cl"] = r.ell_cl;
  j["ell_loc"] = r.ell_loc;
  j["ell_inst2"] = r.ell_inst2;
  j["g_dec2"] = r.g_dec2;
  j["omega_nu"] = to_json(r.omega_nu);
  j["kappa"] = r.kappa;
  j["kappa0_printed"] = r.kappa0_printed;
  j["kappa0_amgm_cap"] = r.kappa0_amgm_cap;
  j["lindblad_ok"] = r.lindblad_ok;
  j["relaxation_time"] = r.relaxation_time;
  return j;
}

json to_json(const PairingRecord& r) {
  json j;
  json idx = json::array();
  for (int k = 0; k < 4; ++k) idx.push_back(r.idx[k]);
  j["lambda_assignment"] = idx;
  j["mu_plus"] = to_json(r.mu_plus);
  j["mu_minus"] = to_json(r.mu_minus);
  j["diag_residual"] = r.diag_residual;
  return j;
}

json matrix_json(const Eigen::Matrix4cd& m) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int k = 0; k < 4; ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

json matrix_json(const Eigen::Matrix2d& m) {
  json rows = json::array();
  for (int i = 0; i < 2; ++i) {
    json row = json::array();
    for (int k = 0; k < 2; ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), width_(header.size()), path_(path) {
  if (!out_) throw std::runtime_error("cannot open for writing: " + path);
  for (size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw std::logic_error("csv row width mismatch: " + path_);
  for (size_t k = 0; k < values.size(); ++k) out_ << (k ? "," : "") << format_g17(values[k]);
  out_ << "\n";
  if (!out_) throw std::runtime_error("write failed: " + path_);
}

CsvWriter::~CsvWriter() = default;

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create directory " + path + ": " + ec.message());
}

}  // namespace oho

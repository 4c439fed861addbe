#pragma once
// Serialization helpers shared by the CLI and the tests: deterministic JSON
// (nlohmann, sorted keys by construction) and CSV with %.17g columns.
// Every JSON document embeds the resolved parameters and, when a ladder set
// is in play, the spectral pairing actually used.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oho/ladder.hpp"
#include "oho/params.hpp"

namespace oho {

using json = nlohmann::ordered_json;

json to_json(const cd& z);  // [re, im]
json to_json(const ModelParams& p);
json to_json(const ValidationReport& r);
json to_json(const ScalesReport& r);
json to_json(const PairingRecord& r);
json matrix_json(const Eigen::Matrix4cd& m);
json matrix_json(const Eigen::Matrix2d& m);

// writes with trailing newline; throws std::runtime_error on I/O failure
void write_json(const json& j, const std::string& path);

// CSV writer, one %.17g value per cell
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  ~CsvWriter();

 private:
  std::ofstream out_;
  size_t width_;
  std::string path_;
};

std::string format_g17(double v);

// creates the directory (and parents) if needed; throws on failure
void ensure_dir(const std::string& path);

}  // namespace oho

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biphoton/biphoton.hpp"
#include "biphoton/scan.hpp"

namespace biphoton {

// Fixed 12 significant digits so reruns diff cleanly.
std::string format_number(double x);

void write_grid_csv(const std::filesystem::path& path, const BiphotonGrid& grid);
nlohmann::json grid_header(const BiphotonGrid& grid);

// Columns: <axis_name>, rate, envelope, fringe_phase.
void write_scan_csv(const std::filesystem::path& path, const ScanResult& scan);
// Reads the first column as the axis and a column named "rate" (else the second).
ScanResult read_scan_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

struct RunManifest {
  std::string command;
  std::string config_path;
  std::filesystem::path output_dir;
  std::string version = BIPHOTON_VERSION;
  nlohmann::json parameters = nlohmann::json::object();
  double wall_time_s = 0.0;
  std::vector<std::string> outputs;  // file names relative to output_dir

  void add_output(const std::string& name);
  nlohmann::json to_json() const;
  // Writes manifest.json into output_dir; the manifest lists itself.
  std::filesystem::path write() const;
};

}  // namespace biphoton

#include "biphoton/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "biphoton/errors.hpp"

namespace biphoton {

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);  // no "-0"
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return cells;
}

}  // namespace

void write_grid_csv(const std::filesystem::path& path, const BiphotonGrid& grid) {
  auto out = open_out(path);
  out << "t_plus,t_minus,re,im,abs2\n";
  for (int i = 0; i < grid.t_plus.count; ++i) {
    for (int j = 0; j < grid.t_minus.count; ++j) {
      const cplx v = grid.at(i, j);
      out << format_number(grid.t_plus.at(i)) << ',' << format_number(grid.t_minus.at(j)) << ','
          << format_number(v.real()) << ',' << format_number(v.imag()) << ','
          << format_number(std::norm(v)) << '\n';
    }
  }
  if (!out) throw ValidationError("write failed: " + path.string());
}

nlohmann::json grid_header(const BiphotonGrid& grid) {
  auto axis = [](const Axis& a) {
    return nlohmann::json{{"start_fs", a.start}, {"step_fs", a.step}, {"count", a.count}};
  };
  return {{"t_plus", axis(grid.t_plus)},
          {"t_minus", axis(grid.t_minus)},
          {"layout", "row-major, t_minus fastest"},
          {"normalization", "peak |Pi| = 1"},
          {"norm_trapezoid", grid.norm},
          {"columns", {"t_plus", "t_minus", "re", "im", "abs2"}}};
}

void write_scan_csv(const std::filesystem::path& path, const ScanResult& scan) {
  scan.validate();
  auto out = open_out(path);
  out << scan.axis_name << ",rate,envelope,fringe_phase\n";
  for (std::size_t i = 0; i < scan.size(); ++i) {
    out << format_number(scan.delay_axis[i]) << ',' << format_number(scan.rates[i]) << ','
        << format_number(scan.envelope.empty() ? 0.0 : scan.envelope[i]) << ','
        << format_number(scan.fringe_phase.empty() ? 0.0 : scan.fringe_phase[i]) << '\n';
  }
  if (!out) throw ValidationError("write failed: " + path.string());
}

ScanResult read_scan_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::string line;
  std::size_t rate_col = 1;
  ScanResult scan;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_csv(line);
    if (first) {
      first = false;
      char* end = nullptr;
      std::strtod(cells.empty() ? "" : cells[0].c_str(), &end);
      if (cells.empty() || end == cells[0].c_str() || *end != '\0') {
        scan.axis_name = cells.empty() ? "delay_fs" : cells[0];
        const auto it = std::find(cells.begin(), cells.end(), "rate");
        if (it != cells.end()) rate_col = static_cast<std::size_t>(it - cells.begin());
        if (cells.size() < 2) throw ValidationError(path.string() + ": need at least 2 columns");
        continue;
      }
    }
    if (cells.size() <= rate_col)
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": missing rate column");
    try {
      scan.delay_axis.push_back(std::stod(cells[0]));
      scan.rates.push_back(std::stod(cells[rate_col]));
    } catch (const std::exception&) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  scan.validate();
  return scan;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw ValidationError("write failed: " + path.string());
}

void RunManifest::add_output(const std::string& name) {
  if (std::find(outputs.begin(), outputs.end(), name) == outputs.end()) outputs.push_back(name);
}

nlohmann::json RunManifest::to_json() const {
  std::vector<std::string> files = outputs;
  if (std::find(files.begin(), files.end(), "manifest.json") == files.end()) files.push_back("manifest.json");
  return {{"command", command},
          {"config_path", config_path},
          {"output_dir", output_dir.string()},
          {"version", version},
          {"parameters", parameters},
          {"wall_time_s", wall_time_s},
          {"outputs", files}};
}

std::filesystem::path RunManifest::write() const {
  const auto path = output_dir / "manifest.json";
  write_json(path, to_json());
  return path;
}

}  // namespace biphoton

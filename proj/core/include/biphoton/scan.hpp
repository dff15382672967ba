#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace biphoton {

// Rates on a delay (or angle) axis. envelope holds the local fringe
// visibility and fringe_phase the phase of the interference term.
struct ScanResult {
  std::string axis_name = "delay_fs";
  std::vector<double> delay_axis;
  std::vector<double> rates;
  std::vector<double> envelope;
  std::vector<double> fringe_phase;
  nlohmann::json meta = nlohmann::json::object();

  std::size_t size() const { return delay_axis.size(); }
  void validate() const;
  // Fringe angular frequency recorded by the producer, if any.
  std::optional<double> omega() const;
  // Uniform step of delay_axis; throws if the axis is not uniform.
  double uniform_step() const;
};

}  // namespace biphoton

#pragma once

#include <array>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "biphoton/dispersion.hpp"
#include "biphoton/quadrature.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

// Resolved run parameters from a JSON config. Field names:
//   pump:    {preset} | {lambda_nm, envelope_fwhm_fs | fwhm_nm | fwhm_radfs}
//   crystal: {preset, [L_um, D, D_plus, D_second overrides]} |
//            {kind: "type2"|"type1", L_um, D, D_plus, D_second}
//   filters: "none" | [filter] | [filter, filter], filter = "none" |
//            {center_nm, fwhm_nm} | {center_radfs, fwhm_radfs}
//   quadrature (optional): {rel_tol, abs_tol, max_subdivisions}
struct RunConfig {
  PumpPulse pump;
  CrystalParams crystal;
  std::array<SpectralFilter, 2> filters{};
  QuadConfig quad;
  std::string pump_preset;
  std::string crystal_preset;

  bool filtered() const { return !filters[0].infinite() || !filters[1].infinite(); }
  nlohmann::json to_json() const;
};

RunConfig parse_config(const nlohmann::json& j,
                       const PresetCatalog& catalog = PresetCatalog::builtin());
RunConfig load_config(const std::filesystem::path& path,
                      const PresetCatalog& catalog = PresetCatalog::builtin());

SpectralFilter parse_filter(const nlohmann::json& j, const std::string& field);
nlohmann::json filter_to_json(const SpectralFilter& f);

}  // namespace biphoton

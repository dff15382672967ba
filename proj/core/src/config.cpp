#include "biphoton/config.hpp"

#include <fstream>
#include <sstream>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

using nlohmann::json;

double number_field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw ValidationError(path + "." + key + " is required");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(path + "." + key + " must be a number");
  return v.get<double>();
}

double positive_field(const json& obj, const std::string& key, const std::string& path) {
  const double v = number_field(obj, key, path);
  if (!(v > 0.0)) throw ValidationError(path + "." + key + " must be positive");
  return v;
}

PumpPulse parse_pump(const json& j, const PresetCatalog& catalog, std::string& preset_name) {
  if (!j.is_object()) throw ValidationError("pump must be an object");
  if (j.contains("preset")) {
    preset_name = j.at("preset").get<std::string>();
    return catalog.pump(preset_name).pulse();
  }
  const double lambda = positive_field(j, "lambda_nm", "pump");
  if (j.contains("envelope_fwhm_fs"))
    return make_pump_from_envelope(lambda, positive_field(j, "envelope_fwhm_fs", "pump"));
  if (j.contains("fwhm_nm"))
    return make_pump(lambda, bandwidth_radfs_from_nm(positive_field(j, "fwhm_nm", "pump"), lambda));
  if (j.contains("fwhm_radfs")) return make_pump(lambda, positive_field(j, "fwhm_radfs", "pump"));
  throw ValidationError("pump needs one of envelope_fwhm_fs, fwhm_nm, fwhm_radfs");
}

CrystalParams parse_crystal(const json& j, const PumpPulse& pump, const PresetCatalog& catalog,
                            std::string& preset_name) {
  if (!j.is_object()) throw ValidationError("crystal must be an object");
  CrystalParams c;
  if (j.contains("preset")) {
    preset_name = j.at("preset").get<std::string>();
    c = catalog.crystal_params(preset_name, pump);
    if (j.contains("kind") && parse_crystal_kind(j.at("kind").get<std::string>()) != c.kind)
      throw ValidationError("crystal.kind conflicts with preset " + preset_name);
  } else {
    if (!j.contains("kind")) throw ValidationError("crystal.kind is required");
    c.kind = parse_crystal_kind(j.at("kind").get<std::string>());
    c.length_um = positive_field(j, "L_um", "crystal");
    c.D_plus = number_field(j, "D_plus", "crystal");
    if (c.kind == CrystalKind::TypeII) {
      c.D = number_field(j, "D", "crystal");
    } else {
      if (!j.contains("D_second")) throw ValidationError("crystal.D_second required for type1");
      c.D_second = number_field(j, "D_second", "crystal");
    }
  }
  if (j.contains("L_um")) c.length_um = positive_field(j, "L_um", "crystal");
  if (j.contains("D")) c.D = number_field(j, "D", "crystal");
  if (j.contains("D_plus")) c.D_plus = number_field(j, "D_plus", "crystal");
  if (j.contains("D_second")) c.D_second = number_field(j, "D_second", "crystal");
  c.validate();
  return c;
}

}  // namespace

SpectralFilter parse_filter(const json& j, const std::string& field) {
  if (j.is_string()) {
    if (j.get<std::string>() == "none") return SpectralFilter::none();
    throw ValidationError(field + " must be \"none\" or an object");
  }
  if (!j.is_object()) throw ValidationError(field + " must be \"none\" or an object");
  if (j.contains("center_radfs"))
    return SpectralFilter::gaussian(positive_field(j, "center_radfs", field),
                                    positive_field(j, "fwhm_radfs", field));
  if (j.contains("center_nm"))
    return SpectralFilter::from_nm(positive_field(j, "center_nm", field),
                                   positive_field(j, "fwhm_nm", field));
  throw ValidationError(field + " needs center_nm/fwhm_nm or center_radfs/fwhm_radfs");
}

json filter_to_json(const SpectralFilter& f) {
  if (f.infinite()) return "none";
  return json{{"center_radfs", f.center},
              {"fwhm_radfs", fwhm_from_sigma(f.sigma)},
              {"sigma_radfs", f.sigma},
              {"center_nm", wavelength_nm_from_omega(f.center)}};
}

RunConfig parse_config(const json& j, const PresetCatalog& catalog) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  RunConfig rc;
  if (!j.contains("pump")) throw ValidationError("pump is required");
  rc.pump = parse_pump(j.at("pump"), catalog, rc.pump_preset);
  if (!j.contains("crystal")) throw ValidationError("crystal is required");
  rc.crystal = parse_crystal(j.at("crystal"), rc.pump, catalog, rc.crystal_preset);
  if (j.contains("filters")) {
    const json& f = j.at("filters");
    if (f.is_string()) {
      rc.filters = {parse_filter(f, "filters"), parse_filter(f, "filters")};
    } else if (f.is_array() && f.size() == 1) {
      rc.filters[0] = rc.filters[1] = parse_filter(f.at(0), "filters[0]");
    } else if (f.is_array() && f.size() == 2) {
      rc.filters[0] = parse_filter(f.at(0), "filters[0]");
      rc.filters[1] = parse_filter(f.at(1), "filters[1]");
    } else {
      throw ValidationError("filters must be \"none\" or an array of one or two filters");
    }
  }
  if (j.contains("quadrature")) {
    const json& q = j.at("quadrature");
    if (q.contains("rel_tol")) rc.quad.rel_tol = number_field(q, "rel_tol", "quadrature");
    if (q.contains("abs_tol")) rc.quad.abs_tol = number_field(q, "abs_tol", "quadrature");
    if (q.contains("max_subdivisions"))
      rc.quad.max_subdivisions = q.at("max_subdivisions").get<int>();
    rc.quad.validate();
  }
  return rc;
}

RunConfig load_config(const std::filesystem::path& path, const PresetCatalog& catalog) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  try {
    return parse_config(j, catalog);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config field has wrong type: ") + e.what());
  }
}

json RunConfig::to_json() const {
  json j;
  j["pump"] = {{"lambda_nm", pump.central_wavelength_nm},
               {"omega_p_radfs", pump.omega_p},
               {"sigma_p_radfs", pump.sigma_p},
               {"sigma_p_fwhm_radfs", pump.sigma_p_fwhm},
               {"envelope_fwhm_fs", pump.envelope_fwhm()}};
  if (!pump_preset.empty()) j["pump"]["preset"] = pump_preset;
  j["crystal"] = {{"kind", std::string(to_string(crystal.kind))},
                  {"L_um", crystal.length_um},
                  {"D", crystal.D},
                  {"D_plus", crystal.D_plus},
                  {"D_second", crystal.D_second}};
  if (!crystal_preset.empty()) j["crystal"]["preset"] = crystal_preset;
  j["filters"] = json::array({filter_to_json(filters[0]), filter_to_json(filters[1])});
  j["quadrature"] = {{"rel_tol", quad.rel_tol},
                     {"abs_tol", quad.abs_tol},
                     {"max_subdivisions", quad.max_subdivisions}};
  return j;
}

}  // namespace biphoton

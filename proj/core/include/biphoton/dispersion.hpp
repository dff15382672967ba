#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "biphoton/units.hpp"

namespace biphoton {

// n^2 = A + B/(lambda^2 - C) - D lambda^2, lambda in um.
struct SellmeierCoefficients {
  double A = 1.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;

  double n(double lambda_um) const;
  double dn(double lambda_um) const;   // dn/dlambda
  double d2n(double lambda_um) const;  // d^2n/dlambda^2
};

// Index, first and second wavelength derivatives at one wavelength.
struct IndexJet {
  double n = 1.0;
  double dn = 0.0;
  double d2n = 0.0;
};

struct DispersionPreset {
  std::string name;
  std::string reference;
  SellmeierCoefficients ordinary;
  SellmeierCoefficients extraordinary;
  double valid_min_um = 0.0;
  double valid_max_um = 0.0;

  IndexJet ordinary_jet(double lambda_um) const;
  // Extraordinary wave at angle theta to the optic axis.
  IndexJet extraordinary_jet(double lambda_um, double theta) const;

  static DispersionPreset constant_index(double n0);
};

// K = Omega n / c. Group delay per length and group-velocity dispersion.
double inverse_group_velocity(const IndexJet& jet, double lambda_um);  // fs/um
double group_velocity_dispersion(const IndexJet& jet, double lambda_um);  // fs^2/um

struct DerivedDispersion {
  CrystalKind kind = CrystalKind::TypeII;
  double theta_rad = 0.0;     // phase-matching angle
  double inv_u_o = 0.0;       // degenerate ordinary wave
  double inv_u_e = 0.0;       // degenerate extraordinary wave (type-II)
  double inv_u_p = 0.0;       // pump
  double D = 0.0;
  double D_plus = 0.0;
  double D_second = 0.0;
};

// Collinear degenerate phase matching at the pump wavelength, analytic derivatives.
DerivedDispersion derive_dispersion(const DispersionPreset& preset, const PumpPulse& pump,
                                    CrystalKind kind);

// Unvalidated: a dispersionless preset legitimately yields D = D'' = 0.
CrystalParams derive_crystal_params(const DispersionPreset& preset, const PumpPulse& pump,
                                    CrystalKind kind, double length_um);

struct PumpPreset {
  std::string name;
  double lambda_nm = 0.0;
  double envelope_fwhm_fs = 0.0;
  std::string note;

  PumpPulse pulse() const { return make_pump_from_envelope(lambda_nm, envelope_fwhm_fs); }
};

struct CrystalPreset {
  std::string name;
  std::string material;
  CrystalKind kind = CrystalKind::TypeII;
  double length_um = 0.0;
  std::string pump;  // default pump preset
  std::string note;
};

class PresetCatalog {
 public:
  static const PresetCatalog& builtin();
  static PresetCatalog from_json_text(std::string_view text);

  const std::vector<DispersionPreset>& materials() const { return materials_; }
  const std::vector<PumpPreset>& pumps() const { return pumps_; }
  const std::vector<CrystalPreset>& crystals() const { return crystals_; }

  const DispersionPreset& material(std::string_view name) const;
  const PumpPreset& pump(std::string_view name) const;
  const CrystalPreset& crystal(std::string_view name) const;
  bool has(std::string_view name) const;

  CrystalParams crystal_params(std::string_view crystal_name, const PumpPulse& pump) const;

 private:
  std::vector<DispersionPreset> materials_;
  std::vector<PumpPreset> pumps_;
  std::vector<CrystalPreset> crystals_;
};

}  // namespace biphoton

#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>

// Internal units: fs, um, rad/fs. Wavelengths in nm only at the boundary.
namespace biphoton {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kLn2 = std::numbers::ln2;
inline constexpr double kSpeedOfLight = 0.299792458;  // um/fs

inline double omega_from_wavelength_nm(double lambda_nm) {
  return 2.0 * kPi * kSpeedOfLight / (lambda_nm * 1e-3);
}
inline double wavelength_nm_from_omega(double omega) {
  return 2.0 * kPi * kSpeedOfLight / omega * 1e3;
}
// Small-bandwidth conversion dw = 2 pi c dlambda / lambda^2.
inline double bandwidth_radfs_from_nm(double fwhm_nm, double center_nm) {
  const double lam = center_nm * 1e-3;
  return 2.0 * kPi * kSpeedOfLight * (fwhm_nm * 1e-3) / (lam * lam);
}

// Gaussian amplitude exp(-x^2/sigma^2); fwhm refers to the intensity profile.
inline double sigma_from_fwhm(double fwhm) { return fwhm / std::sqrt(2.0 * kLn2); }
inline double fwhm_from_sigma(double sigma) { return sigma * std::sqrt(2.0 * kLn2); }

// Pump self-interference envelope exp(-(sigma T)^2/8).
inline double sigma_from_envelope_fwhm(double fwhm_fs) {
  return 2.0 * std::sqrt(8.0 * kLn2) / fwhm_fs;
}
inline double envelope_fwhm_from_sigma(double sigma) {
  return 2.0 * std::sqrt(8.0 * kLn2) / sigma;
}

struct PumpPulse {
  double central_wavelength_nm = 0.0;
  double omega_p = 0.0;       // rad/fs
  double sigma_p = 0.0;       // rad/fs
  double sigma_p_fwhm = 0.0;  // rad/fs

  void validate() const;
  double envelope_fwhm() const { return envelope_fwhm_from_sigma(sigma_p); }
  PumpPulse with_sigma(double sigma) const;
};

PumpPulse make_pump(double lambda_nm, double fwhm_bandwidth_radfs);
PumpPulse make_pump_from_envelope(double lambda_nm, double envelope_fwhm_fs);

enum class CrystalKind { TypeII, TypeIDegenerate };

std::string_view to_string(CrystalKind kind);
CrystalKind parse_crystal_kind(std::string_view text);

struct CrystalParams {
  CrystalKind kind = CrystalKind::TypeII;
  double length_um = 0.0;
  double D = 0.0;         // fs/um
  double D_plus = 0.0;    // fs/um
  double D_second = 0.0;  // fs^2/um

  void validate() const;
  CrystalParams with_length(double length) const;

  static CrystalParams type2(double length_um, double D, double D_plus);
  static CrystalParams type1(double length_um, double D_plus, double D_second);
};

struct SpectralFilter {
  double center = 0.0;                                    // rad/fs
  double sigma = std::numeric_limits<double>::infinity();  // rad/fs

  bool infinite() const { return !std::isfinite(sigma); }
  double amplitude(double omega) const;
  void validate() const;

  static SpectralFilter none() { return {}; }
  static SpectralFilter gaussian(double center, double fwhm);
  static SpectralFilter from_nm(double center_nm, double fwhm_nm);
};

}  // namespace biphoton

#include "biphoton/units.hpp"

#include "biphoton/errors.hpp"

namespace biphoton {

void PumpPulse::validate() const {
  if (!(central_wavelength_nm > 0.0) || !std::isfinite(central_wavelength_nm))
    throw ValidationError("pump.lambda_nm must be positive");
  if (!(omega_p > 0.0)) throw ValidationError("pump.omega_p must be positive");
  if (!(sigma_p > 0.0) || !std::isfinite(sigma_p))
    throw ValidationError("pump bandwidth must be positive and finite");
}

PumpPulse PumpPulse::with_sigma(double sigma) const {
  PumpPulse p = *this;
  p.sigma_p = sigma;
  p.sigma_p_fwhm = fwhm_from_sigma(sigma);
  p.validate();
  return p;
}

PumpPulse make_pump(double lambda_nm, double fwhm_bandwidth_radfs) {
  if (!(lambda_nm > 0.0)) throw ValidationError("pump.lambda_nm must be positive");
  if (!(fwhm_bandwidth_radfs > 0.0))
    throw ValidationError("pump bandwidth must be positive");
  PumpPulse p;
  p.central_wavelength_nm = lambda_nm;
  p.omega_p = omega_from_wavelength_nm(lambda_nm);
  p.sigma_p_fwhm = fwhm_bandwidth_radfs;
  p.sigma_p = sigma_from_fwhm(fwhm_bandwidth_radfs);
  p.validate();
  return p;
}

PumpPulse make_pump_from_envelope(double lambda_nm, double envelope_fwhm_fs) {
  if (!(envelope_fwhm_fs > 0.0))
    throw ValidationError("pump.envelope_fwhm_fs must be positive");
  return make_pump(lambda_nm, fwhm_from_sigma(sigma_from_envelope_fwhm(envelope_fwhm_fs)));
}

std::string_view to_string(CrystalKind kind) {
  return kind == CrystalKind::TypeII ? "type2" : "type1";
}

CrystalKind parse_crystal_kind(std::string_view text) {
  if (text == "type2" || text == "typeII" || text == "TypeII") return CrystalKind::TypeII;
  if (text == "type1" || text == "typeI" || text == "TypeIDegenerate")
    return CrystalKind::TypeIDegenerate;
  throw ValidationError("crystal.kind must be \"type2\" or \"type1\", got \"" +
                        std::string(text) + "\"");
}

void CrystalParams::validate() const {
  if (!(length_um > 0.0) || !std::isfinite(length_um))
    throw ValidationError("crystal.L_um must be positive");
  if (!std::isfinite(D) || !std::isfinite(D_plus) || !std::isfinite(D_second))
    throw ValidationError("crystal dispersion constants must be finite");
  if (kind == CrystalKind::TypeII && D == 0.0)
    throw ValidationError("crystal.D must be non-zero for type2");
  if (kind == CrystalKind::TypeIDegenerate && D_second == 0.0)
    throw ValidationError("crystal.D_second required (non-zero) for type1");
}

CrystalParams CrystalParams::with_length(double length) const {
  CrystalParams c = *this;
  c.length_um = length;
  c.validate();
  return c;
}

CrystalParams CrystalParams::type2(double length_um, double D, double D_plus) {
  CrystalParams c{CrystalKind::TypeII, length_um, D, D_plus, 0.0};
  c.validate();
  return c;
}

CrystalParams CrystalParams::type1(double length_um, double D_plus, double D_second) {
  CrystalParams c{CrystalKind::TypeIDegenerate, length_um, 0.0, D_plus, D_second};
  c.validate();
  return c;
}

double SpectralFilter::amplitude(double omega) const {
  if (infinite()) return 1.0;
  const double x = (omega - center) / sigma;
  return std::exp(-x * x);
}

void SpectralFilter::validate() const {
  if (!(center >= 0.0) || !std::isfinite(center))
    throw ValidationError("filter center must be finite and non-negative");
  if (!(sigma > 0.0)) throw ValidationError("filter width must be positive");
}

SpectralFilter SpectralFilter::gaussian(double center, double fwhm) {
  if (!(fwhm > 0.0)) throw ValidationError("filter fwhm must be positive");
  SpectralFilter f{center, sigma_from_fwhm(fwhm)};
  f.validate();
  return f;
}

SpectralFilter SpectralFilter::from_nm(double center_nm, double fwhm_nm) {
  if (!(center_nm > 0.0)) throw ValidationError("filter center_nm must be positive");
  return gaussian(omega_from_wavelength_nm(center_nm),
                  bandwidth_radfs_from_nm(fwhm_nm, center_nm));
}

}  // namespace biphoton

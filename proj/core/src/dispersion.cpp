#include "biphoton/dispersion.hpp"

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace detail {
std::string_view embedded_presets_json();
}

double SellmeierCoefficients::n(double lambda_um) const {
  const double q = lambda_um * lambda_um;
  return std::sqrt(A + B / (q - C) - D * q);
}

double SellmeierCoefficients::dn(double lambda_um) const {
  const double q = lambda_um * lambda_um;
  const double r = q - C;
  const double dn2 = 2.0 * lambda_um * (-B / (r * r) - D);
  return dn2 / (2.0 * n(lambda_um));
}

double SellmeierCoefficients::d2n(double lambda_um) const {
  const double q = lambda_um * lambda_um;
  const double r = q - C;
  const double d2n2 = 2.0 * (-B / (r * r) - D) + 8.0 * B * q / (r * r * r);
  const double n0 = n(lambda_um);
  const double n1 = dn(lambda_um);
  return (d2n2 - 2.0 * n1 * n1) / (2.0 * n0);
}

IndexJet DispersionPreset::ordinary_jet(double lambda_um) const {
  return {ordinary.n(lambda_um), ordinary.dn(lambda_um), ordinary.d2n(lambda_um)};
}

IndexJet DispersionPreset::extraordinary_jet(double lambda_um, double theta) const {
  const IndexJet o = ordinary_jet(lambda_um);
  const IndexJet e{extraordinary.n(lambda_um), extraordinary.dn(lambda_um),
                   extraordinary.d2n(lambda_um)};
  const double c2 = std::cos(theta) * std::cos(theta);
  const double s2 = std::sin(theta) * std::sin(theta);
  // 1/n^2 = cos^2/n_o^2 + sin^2/n_e^2
  const double f = c2 / (o.n * o.n) + s2 / (e.n * e.n);
  const double f1 = -2.0 * c2 * o.dn / std::pow(o.n, 3) - 2.0 * s2 * e.dn / std::pow(e.n, 3);
  const double f2 =
      c2 * (6.0 * o.dn * o.dn / std::pow(o.n, 4) - 2.0 * o.d2n / std::pow(o.n, 3)) +
      s2 * (6.0 * e.dn * e.dn / std::pow(e.n, 4) - 2.0 * e.d2n / std::pow(e.n, 3));
  IndexJet out;
  out.n = 1.0 / std::sqrt(f);
  out.dn = -0.5 * std::pow(f, -1.5) * f1;
  out.d2n = 0.75 * std::pow(f, -2.5) * f1 * f1 - 0.5 * std::pow(f, -1.5) * f2;
  return out;
}

DispersionPreset DispersionPreset::constant_index(double n0) {
  DispersionPreset p;
  p.name = "constant-index";
  p.reference = "dispersionless medium";
  p.ordinary = {n0 * n0, 0.0, 0.0, 0.0};
  p.extraordinary = p.ordinary;
  p.valid_min_um = 0.0;
  p.valid_max_um = std::numeric_limits<double>::infinity();
  return p;
}

double inverse_group_velocity(const IndexJet& jet, double lambda_um) {
  return (jet.n - lambda_um * jet.dn) / kSpeedOfLight;
}

double group_velocity_dispersion(const IndexJet& jet, double lambda_um) {
  return lambda_um * lambda_um * lambda_um * jet.d2n /
         (2.0 * kPi * kSpeedOfLight * kSpeedOfLight);
}

namespace {

template <class F>
double phase_matching_angle(F mismatch) {
  double lo = 0.0;
  double hi = 0.5 * kPi;
  double flo = mismatch(lo);
  const double fhi = mismatch(hi);
  if (std::abs(flo) < 1e-14 && std::abs(fhi) < 1e-14) return 0.0;  // isotropic
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw DomainError("no collinear phase-matching angle for this material and pump");
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = mismatch(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

DerivedDispersion derive_dispersion(const DispersionPreset& preset, const PumpPulse& pump,
                                    CrystalKind kind) {
  pump.validate();
  const double lp = pump.central_wavelength_nm * 1e-3;
  const double ld = 2.0 * lp;
  const double tol = 1e-12;
  if (lp < preset.valid_min_um - tol || ld > preset.valid_max_um + tol)
    throw DomainError("wavelengths [" + std::to_string(lp) + ", " + std::to_string(ld) +
                      "] um outside the validity range of preset " + preset.name);

  DerivedDispersion out;
  out.kind = kind;
  const IndexJet o_d = preset.ordinary_jet(ld);
  out.inv_u_o = inverse_group_velocity(o_d, ld);

  if (kind == CrystalKind::TypeII) {
    out.theta_rad = phase_matching_angle([&](double th) {
      return 2.0 * preset.extraordinary_jet(lp, th).n - o_d.n -
             preset.extraordinary_jet(ld, th).n;
    });
    const IndexJet e_d = preset.extraordinary_jet(ld, out.theta_rad);
    const IndexJet e_p = preset.extraordinary_jet(lp, out.theta_rad);
    out.inv_u_e = inverse_group_velocity(e_d, ld);
    out.inv_u_p = inverse_group_velocity(e_p, lp);
    out.D = out.inv_u_o - out.inv_u_e;
    out.D_plus = 0.5 * (out.inv_u_o + out.inv_u_e) - out.inv_u_p;
  } else {
    out.theta_rad = phase_matching_angle(
        [&](double th) { return preset.extraordinary_jet(lp, th).n - o_d.n; });
    const IndexJet e_p = preset.extraordinary_jet(lp, out.theta_rad);
    out.inv_u_e = out.inv_u_o;
    out.inv_u_p = inverse_group_velocity(e_p, lp);
    out.D_plus = out.inv_u_o - out.inv_u_p;
    out.D_second = group_velocity_dispersion(o_d, ld);
  }
  return out;
}

CrystalParams derive_crystal_params(const DispersionPreset& preset, const PumpPulse& pump,
                                    CrystalKind kind, double length_um) {
  const DerivedDispersion d = derive_dispersion(preset, pump, kind);
  CrystalParams c;
  c.kind = kind;
  c.length_um = length_um;
  c.D = d.D;
  c.D_plus = d.D_plus;
  c.D_second = d.D_second;
  return c;
}

namespace {

SellmeierCoefficients parse_sellmeier(const nlohmann::json& j) {
  return {j.at("A").get<double>(), j.at("B").get<double>(), j.at("C").get<double>(),
          j.at("D").get<double>()};
}

template <class T>
const T& find_named(const std::vector<T>& items, std::string_view name, const char* what) {
  for (const auto& item : items)
    if (item.name == name) return item;
  throw ValidationError(std::string("unknown ") + what + " preset \"" + std::string(name) +
                        "\"");
}

}  // namespace

PresetCatalog PresetCatalog::from_json_text(std::string_view text) {
  PresetCatalog cat;
  const auto j = nlohmann::json::parse(text);
  for (const auto& m : j.at("materials")) {
    DispersionPreset p;
    p.name = m.at("name").get<std::string>();
    p.reference = m.value("reference", "");
    p.ordinary = parse_sellmeier(m.at("ordinary"));
    p.extraordinary = parse_sellmeier(m.at("extraordinary"));
    p.valid_min_um = m.at("valid_um").at(0).get<double>();
    p.valid_max_um = m.at("valid_um").at(1).get<double>();
    cat.materials_.push_back(std::move(p));
  }
  for (const auto& m : j.at("pumps")) {
    PumpPreset p;
    p.name = m.at("name").get<std::string>();
    p.lambda_nm = m.at("lambda_nm").get<double>();
    p.envelope_fwhm_fs = m.at("envelope_fwhm_fs").get<double>();
    p.note = m.value("note", "");
    cat.pumps_.push_back(std::move(p));
  }
  for (const auto& m : j.at("crystals")) {
    CrystalPreset p;
    p.name = m.at("name").get<std::string>();
    p.material = m.at("material").get<std::string>();
    p.kind = parse_crystal_kind(m.at("kind").get<std::string>());
    p.length_um = m.at("L_um").get<double>();
    p.pump = m.value("pump", "");
    p.note = m.value("note", "");
    cat.crystals_.push_back(std::move(p));
  }
  return cat;
}

const PresetCatalog& PresetCatalog::builtin() {
  static const PresetCatalog cat = from_json_text(detail::embedded_presets_json());
  return cat;
}

const DispersionPreset& PresetCatalog::material(std::string_view name) const {
  return find_named(materials_, name, "material");
}
const PumpPreset& PresetCatalog::pump(std::string_view name) const {
  return find_named(pumps_, name, "pump");
}
const CrystalPreset& PresetCatalog::crystal(std::string_view name) const {
  return find_named(crystals_, name, "crystal");
}

bool PresetCatalog::has(std::string_view name) const {
  for (const auto& p : pumps_)
    if (p.name == name) return true;
  for (const auto& c : crystals_)
    if (c.name == name) return true;
  for (const auto& m : materials_)
    if (m.name == name) return true;
  return false;
}

CrystalParams PresetCatalog::crystal_params(std::string_view crystal_name,
                                            const PumpPulse& pump_pulse) const {
  const CrystalPreset& c = crystal(crystal_name);
  return derive_crystal_params(material(c.material), pump_pulse, c.kind, c.length_um);
}

}  // namespace biphoton

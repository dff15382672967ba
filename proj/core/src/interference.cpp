#include "biphoton/interference.hpp"

#include <algorithm>
#include <cmath>

#include "biphoton/errors.hpp"
#include "biphoton/parallel.hpp"

namespace biphoton {

AnalyzerPair AnalyzerPair::degrees(double t1, double t2) {
  return {t1 * kPi / 180.0, t2 * kPi / 180.0};
}

double AnalyzerPair::projection(const std::array<Polarization, 2>& pol) const {
  auto axis = [](Polarization p, double th) { return p == Polarization::H ? std::cos(th) : std::sin(th); };
  return axis(pol[0], theta1) * axis(pol[1], theta2);
}

std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::TypeII_MZI: return "type2-mzi";
    case SchemeKind::TypeI_MZI: return "type1-mzi";
    case SchemeKind::TypeII_HOM_single: return "hom";
    case SchemeKind::Branning4: return "branning";
  }
  return "unknown";
}

SchemeKind parse_scheme(std::string_view text) {
  if (text == "type2-mzi") return SchemeKind::TypeII_MZI;
  if (text == "type1-mzi") return SchemeKind::TypeI_MZI;
  if (text == "hom") return SchemeKind::TypeII_HOM_single;
  if (text == "branning") return SchemeKind::Branning4;
  throw ValidationError("unknown scheme \"" + std::string(text) +
                        "\" (expected type2-mzi, type1-mzi, hom, branning)");
}

Scheme::Scheme(SchemeKind kind, std::shared_ptr<const BiphotonKernel> kernel, double pass_phase)
    : kind_(kind), kernel_(std::move(kernel)), pass_phase_(pass_phase) {
  if (!kernel_) throw ValidationError("scheme needs a kernel");
  const bool type1 = kind_ == SchemeKind::TypeI_MZI;
  const CrystalKind want = type1 ? CrystalKind::TypeIDegenerate : CrystalKind::TypeII;
  if (kernel_->kind() != want)
    throw ValidationError(std::string(to_string(kind_)) + " requires a " +
                          std::string(biphoton::to_string(want)) + " crystal");
}

Scheme Scheme::type2_mzi(std::shared_ptr<const BiphotonKernel> k) {
  return Scheme(SchemeKind::TypeII_MZI, std::move(k), 0.0);
}
Scheme Scheme::type1_mzi(std::shared_ptr<const BiphotonKernel> k) {
  return Scheme(SchemeKind::TypeI_MZI, std::move(k), 0.0);
}
Scheme Scheme::type2_hom_single(std::shared_ptr<const BiphotonKernel> k) {
  return Scheme(SchemeKind::TypeII_HOM_single, std::move(k), 0.0);
}
Scheme Scheme::branning4(std::shared_ptr<const BiphotonKernel> k, double pass_phase) {
  return Scheme(SchemeKind::Branning4, std::move(k), pass_phase);
}
Scheme Scheme::make(SchemeKind kind, std::shared_ptr<const BiphotonKernel> k) {
  return Scheme(kind, std::move(k), 0.0);
}

std::vector<AmplitudeTerm> Scheme::terms(const Delays& d) const {
  using P = Polarization;
  const cplx delayed = std::polar(1.0, -omega_p() * d.T_p);
  switch (kind_) {
    case SchemeKind::TypeII_MZI:
      return {{1.0, 0.0, 0.0, false, {P::H, P::V}, 0},
              {delayed, d.T_p, 0.0, false, {P::V, P::H}, 1}};
    case SchemeKind::TypeI_MZI:
      // The second crystal is rotated by 90 degrees; the right-handed frame
      // puts a minus sign on the |V,V> pathway.
      return {{-1.0, 0.0, 0.0, false, {P::V, P::V}, 0},
              {delayed, d.T_p, 0.0, false, {P::H, P::H}, 1}};
    case SchemeKind::TypeII_HOM_single:
      // The two amplitudes move toward each other as tau grows.
      return {{1.0, 0.0, -d.tau, false, {P::H, P::V}, 0},
              {-1.0, 0.0, d.tau, true, {P::V, P::H}, 1}};
    case SchemeKind::Branning4: {
      // Second-pass photons have exchanged polarization roles, so the same
      // e-o delay moves their amplitudes the opposite way along t-.
      const cplx w2 = delayed * std::polar(1.0, pass_phase_);
      return {{1.0, 0.0, -d.tau, false, {P::H, P::V}, 0},
              {-1.0, 0.0, d.tau, true, {P::V, P::H}, 0},
              {w2, d.T_p, -d.tau, true, {P::V, P::H}, 1},
              {-w2, d.T_p, d.tau, false, {P::H, P::V}, 1}};
    }
  }
  return {};
}

RateComponents rate_components(const Scheme& scheme, const AnalyzerPair& analyzers, const Delays& delays) {
  return rate_components(scheme.kernel(), scheme.terms(delays), analyzers);
}

RateComponents rate_components(const BiphotonKernel& k, const std::vector<AmplitudeTerm>& terms,
                               const AnalyzerPair& analyzers) {
  const std::size_t n = terms.size();
  if (n == 0) throw ValidationError("rate needs at least one pathway");
  std::vector<cplx> c(n);
  std::vector<double> nrm(n);
  double incoherent = 0.0;
  double unprojected = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = terms[i].weight * analyzers.projection(terms[i].pol_pair);
    nrm[i] = k.relative_norm(terms[i].mirror_minus);
    const double w2 = std::norm(terms[i].weight) * nrm[i];
    incoherent += 0.25 * w2;  // every projection is 1/2 at 45/45
    unprojected += w2;
  }
  double direct = 0.0;
  cplx cross{};
  for (std::size_t i = 0; i < n; ++i) {
    direct += std::norm(c[i]) * nrm[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (c[i] == 0.0 || c[j] == 0.0) continue;
      const cplx o = k.cross_overlap(terms[i].shift(), terms[j].shift());
      const cplx term = c[i] * std::conj(c[j]) * o;
      if (terms[i].group == terms[j].group) {
        direct += 2.0 * term.real();
      } else if (terms[i].group == 0) {
        cross += term;
      } else {
        cross += std::conj(term);
      }
    }
  }
  RateComponents rc;
  rc.incoherent45 = incoherent;
  rc.direct = direct / incoherent;
  rc.cross = cross / incoherent;
  rc.single_pathway = unprojected / static_cast<double>(n) / incoherent;
  return rc;
}

double coincidence_rate(const Scheme& scheme, const AnalyzerPair& analyzers, const Delays& delays) {
  return std::max(0.0, rate_components(scheme, analyzers, delays).rate());
}

double envelope_V(double T_p, const PumpPulse& pump) {
  const double x = pump.sigma_p * T_p;
  return std::exp(-x * x / 8.0);
}

double envelope_G(double T_p, const PumpPulse& pump, const CrystalParams& crystal, const QuadConfig& cfg) {
  const double g0 = g_envelope_integral(0.0, pump, crystal, cfg);
  if (T_p == 0.0) return 1.0;
  return g_envelope_integral(T_p, pump, crystal, cfg) / g0;
}

namespace {

nlohmann::json scheme_meta(const Scheme& scheme) {
  const auto& k = scheme.kernel();
  nlohmann::json m;
  m["scheme"] = std::string(to_string(scheme.kind()));
  m["kernel"] = k.description();
  m["omega_p_radfs"] = k.pump().omega_p;
  m["sigma_p_radfs"] = k.pump().sigma_p;
  m["pump_envelope_fwhm_fs"] = k.pump().envelope_fwhm();
  m["crystal"] = {{"kind", std::string(to_string(k.crystal().kind))},
                  {"L_um", k.crystal().length_um},
                  {"D", k.crystal().D},
                  {"D_plus", k.crystal().D_plus},
                  {"D_second", k.crystal().D_second}};
  m["pass_phase_rad"] = scheme.pass_phase();
  return m;
}

}  // namespace

ScanResult polarization_scan(const Scheme& scheme, const std::vector<double>& theta1_axis,
                             double theta2_fixed, double T_p) {
  const double phase = std::remainder(scheme.omega_p() * T_p, 2.0 * kPi);
  if (std::abs(phase) > 1e-9)
    throw ValidationError("polarization_scan needs Omega_p T_p = 0 mod 2 pi");
  ScanResult out;
  out.axis_name = "theta1_rad";
  out.delay_axis = theta1_axis;
  const std::size_t n = theta1_axis.size();
  out.rates.resize(n);
  out.envelope.resize(n);
  out.fringe_phase.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const RateComponents rc = rate_components(scheme, {theta1_axis[i], theta2_fixed}, {T_p, 0.0});
    out.rates[i] = std::max(0.0, rc.rate()) / rc.single_pathway;
    out.envelope[i] = rc.visibility();
    out.fringe_phase[i] = rc.phase();
  });
  out.meta = scheme_meta(scheme);
  out.meta["theta2_rad"] = theta2_fixed;
  out.meta["T_p_fs"] = T_p;
  out.meta["normalization"] = "single unprojected pathway intensity";
  return out;
}

ScanResult spacetime_scan(const Scheme& scheme, const AnalyzerPair& analyzers,
                          const std::vector<double>& T_p_axis, double tau) {
  if (T_p_axis.size() < 2) throw ValidationError("scan axis needs at least 2 points");
  const double period = 2.0 * kPi / scheme.omega_p();
  for (std::size_t i = 1; i < T_p_axis.size(); ++i) {
    const double step = T_p_axis[i] - T_p_axis[i - 1];
    if (!(step > 0.0)) throw ValidationError("scan axis must be strictly increasing");
    if (step > period / 8.0 * (1.0 + 1e-9))
      throw ValidationError("scan step under-samples the fringe: need at least 8 points per " +
                            std::to_string(period) + " fs period");
  }
  ScanResult out;
  out.axis_name = "delay_fs";
  out.delay_axis = T_p_axis;
  const std::size_t n = T_p_axis.size();
  out.rates.resize(n);
  out.envelope.resize(n);
  out.fringe_phase.resize(n);
  double norm = 1.0;
  parallel_for(n, [&](std::size_t i) {
    const RateComponents rc = rate_components(scheme, analyzers, {T_p_axis[i], tau});
    out.rates[i] = std::max(0.0, rc.rate());
    out.envelope[i] = rc.visibility();
    out.fringe_phase[i] = rc.phase();
    if (i == 0) norm = rc.incoherent45;
  });
  out.meta = scheme_meta(scheme);
  out.meta["theta1_rad"] = analyzers.theta1;
  out.meta["theta2_rad"] = analyzers.theta2;
  out.meta["tau_fs"] = tau;
  out.meta["normalization"] = "incoherent sum at 45/45 equals 1";
  out.meta["normalization_constant"] = norm;
  out.meta["fringe_period_fs"] = period;
  return out;
}

ScanResult hom_visibility(const std::vector<double>& tau_axis, const PumpPulse& pump,
                          const CrystalParams& crystal, const FilterPair& filters) {
  if (crystal.kind != CrystalKind::TypeII) throw ValidationError("hom_visibility requires a type2 crystal");
  if (tau_axis.empty()) throw ValidationError("tau axis is empty");
  double max_tau = 0.0;
  for (double t : tau_axis) max_tau = std::max(max_tau, std::abs(t));
  std::shared_ptr<const BiphotonKernel> kernel;
  if (filters[0].infinite() && filters[1].infinite()) {
    kernel = std::make_shared<TypeIIKernel>(pump, crystal);
  } else {
    const double sf = std::min(filters[0].sigma, filters[1].sigma);
    kernel = std::make_shared<FilteredKernel>(
        pump, crystal, filters, QuadConfig{}, 0.0,
        2.0 * max_tau + 2.0 * (std::abs(crystal.D) * crystal.length_um + 16.0 / sf));
  }
  const Scheme scheme = Scheme::type2_hom_single(kernel);
  ScanResult out;
  out.axis_name = "tau_fs";
  out.delay_axis = tau_axis;
  const std::size_t n = tau_axis.size();
  out.rates.resize(n);
  out.envelope.resize(n);
  out.fringe_phase.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const RateComponents rc = rate_components(scheme, {}, {0.0, tau_axis[i]});
    out.rates[i] = std::max(0.0, rc.rate());
    out.envelope[i] = rc.visibility();
    out.fringe_phase[i] = rc.phase();
  });
  const auto best = std::max_element(out.envelope.begin(), out.envelope.end());
  out.meta = scheme_meta(scheme);
  out.meta["max_visibility"] = *best;
  out.meta["tau_at_max_fs"] = tau_axis[static_cast<std::size_t>(best - out.envelope.begin())];
  out.meta["filters"] = nlohmann::json::array();
  for (const auto& f : filters)
    out.meta["filters"].push_back(f.infinite() ? nlohmann::json("none")
                                               : nlohmann::json{{"center_radfs", f.center},
                                                                {"sigma_radfs", f.sigma}});
  return out;
}

double branning_rate(double T_p, double tau, const AnalyzerPair& analyzers, const PumpPulse& pump,
                     const CrystalParams& crystal, double pass_phase) {
  const Scheme s = Scheme::branning4(std::make_shared<TypeIIKernel>(pump, crystal), pass_phase);
  return coincidence_rate(s, analyzers, {T_p, tau});
}

double branning_visibility(double T_p, double tau, const PumpPulse& pump, const CrystalParams& crystal) {
  const Scheme s = Scheme::branning4(std::make_shared<TypeIIKernel>(pump, crystal));
  return rate_components(s, {}, {T_p, tau}).visibility();
}

std::vector<double> linear_axis(double from, double to, double step) {
  if (!(step > 0.0) || !(to >= from)) throw ValidationError("axis needs step > 0 and to >= from");
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  if (n > 50'000'000) throw ValidationError("axis too long");
  std::vector<double> axis(n);
  for (std::size_t i = 0; i < n; ++i) axis[i] = from + step * static_cast<double>(i);
  return axis;
}

}  // namespace biphoton

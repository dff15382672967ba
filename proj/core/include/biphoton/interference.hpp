#pragma once

#include <array>
#include <complex>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "biphoton/biphoton.hpp"
#include "biphoton/scan.hpp"

namespace biphoton {

enum class Polarization { H, V };

struct AmplitudeTerm {
  cplx weight{1.0, 0.0};
  double shift_plus = 0.0;
  double shift_minus = 0.0;
  bool mirror_minus = false;
  std::array<Polarization, 2> pol_pair{Polarization::H, Polarization::V};
  int group = 0;  // interfering family; the delayed pathway is group 1

  TermShift shift() const { return {shift_plus, shift_minus, mirror_minus}; }
};

struct AnalyzerPair {
  double theta1 = 0.25 * kPi;
  double theta2 = 0.25 * kPi;

  static AnalyzerPair degrees(double t1, double t2);
  // Product of analyzer-axis projections for a (arm1, arm2) polarization pair.
  double projection(const std::array<Polarization, 2>& pol) const;
};

struct Delays {
  double T_p = 0.0;  // t+ delay between pathways
  double tau = 0.0;  // e-o delay along t-
};

enum class SchemeKind { TypeII_MZI, TypeI_MZI, TypeII_HOM_single, Branning4 };

std::string_view to_string(SchemeKind kind);
SchemeKind parse_scheme(std::string_view text);

class Scheme {
 public:
  static Scheme type2_mzi(std::shared_ptr<const BiphotonKernel> kernel);
  static Scheme type1_mzi(std::shared_ptr<const BiphotonKernel> kernel);
  static Scheme type2_hom_single(std::shared_ptr<const BiphotonKernel> kernel);
  // pass_phase: extra phase of the second pass, not fixed by the optics.
  static Scheme branning4(std::shared_ptr<const BiphotonKernel> kernel, double pass_phase = 0.0);
  static Scheme make(SchemeKind kind, std::shared_ptr<const BiphotonKernel> kernel);

  SchemeKind kind() const { return kind_; }
  const BiphotonKernel& kernel() const { return *kernel_; }
  std::shared_ptr<const BiphotonKernel> kernel_ptr() const { return kernel_; }
  double omega_p() const { return kernel_->pump().omega_p; }
  double pass_phase() const { return pass_phase_; }

  std::vector<AmplitudeTerm> terms(const Delays& d) const;

 private:
  Scheme(SchemeKind kind, std::shared_ptr<const BiphotonKernel> kernel, double pass_phase);

  SchemeKind kind_;
  std::shared_ptr<const BiphotonKernel> kernel_;
  double pass_phase_;
};

// R(phi) = direct + 2 Re(cross e^{-i phi}) for an extra phase phi on group 1,
// in units of the 45/45 incoherent sum.
struct RateComponents {
  double direct = 0.0;
  cplx cross{};
  double incoherent45 = 1.0;  // normalization constant (unnormalized units)
  double single_pathway = 1.0;  // mean unprojected pathway intensity / incoherent45

  double rate() const { return direct + 2.0 * cross.real(); }
  double visibility() const { return direct > 0.0 ? std::min(1.0, 2.0 * std::abs(cross) / direct) : 0.0; }
  double phase() const { return std::arg(cross); }
};

RateComponents rate_components(const Scheme& scheme, const AnalyzerPair& analyzers, const Delays& delays);
// Same for an explicit pathway list on one kernel.
RateComponents rate_components(const BiphotonKernel& kernel, const std::vector<AmplitudeTerm>& terms,
                               const AnalyzerPair& analyzers);
double coincidence_rate(const Scheme& scheme, const AnalyzerPair& analyzers, const Delays& delays);

double envelope_V(double T_p, const PumpPulse& pump);
double envelope_G(double T_p, const PumpPulse& pump, const CrystalParams& crystal,
                  const QuadConfig& cfg = {});

// theta axes in radians; rates normalized by one pathway's unprojected intensity.
ScanResult polarization_scan(const Scheme& scheme, const std::vector<double>& theta1_axis,
                             double theta2_fixed, double T_p = 0.0);
ScanResult spacetime_scan(const Scheme& scheme, const AnalyzerPair& analyzers,
                          const std::vector<double>& T_p_axis, double tau = 0.0);
ScanResult hom_visibility(const std::vector<double>& tau_axis, const PumpPulse& pump,
                          const CrystalParams& crystal, const FilterPair& filters = {});
double branning_rate(double T_p, double tau, const AnalyzerPair& analyzers, const PumpPulse& pump,
                     const CrystalParams& crystal, double pass_phase = 0.0);
double branning_visibility(double T_p, double tau, const PumpPulse& pump, const CrystalParams& crystal);

// Uniform axis helper: from, from + step, ... up to and including `to`.
std::vector<double> linear_axis(double from, double to, double step);

}  // namespace biphoton

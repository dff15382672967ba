#include <cmath>

#include "biphoton/biphoton.hpp"
#include "biphoton/errors.hpp"

namespace biphoton {

QuadResult pi_type1_result(double t_plus, double t_minus, const PumpPulse& pump,
                           const CrystalParams& crystal, const QuadConfig& cfg) {
  if (crystal.kind != CrystalKind::TypeIDegenerate)
    throw ValidationError("pi_type1 requires a type1 crystal");
  crystal.validate();
  const double s2 = 0.25 * pump.sigma_p * pump.sigma_p;
  const double dp = crystal.D_plus;
  auto f = [&](cplx z) {
    const cplx x = t_plus + dp * z;
    return std::exp(-s2 * x * x);
  };
  const double alpha = t_minus * t_minus / (4.0 * crystal.D_second);
  // Far tails cancel down to round-off of the integrand scale 2 sqrt(L), so
  // accuracy is also accepted relative to that scale.
  QuadConfig c = cfg;
  if (c.abs_tol == 0.0) c.abs_tol = 1e-3 * cfg.rel_tol * 2.0 * std::sqrt(crystal.length_um);
  return chirp_integral(f, alpha, crystal.length_um, {s2 * dp * dp, 0.0}, c);
}

cplx pi_type1(double t_plus, double t_minus, const PumpPulse& pump, const CrystalParams& crystal,
              const QuadConfig& cfg) {
  const QuadResult r = pi_type1_result(t_plus, t_minus, pump, crystal, cfg);
  if (!r.converged)
    throw NumericError("type1 amplitude quadrature did not converge", std::abs(r.value),
                       r.error_bound);
  return r.value;
}

TypeIKernel::TypeIKernel(PumpPulse pump, CrystalParams crystal, QuadConfig cfg)
    : BiphotonKernel(pump, crystal), cfg_(cfg), profile_zero_(0.0) {
  if (crystal_.kind != CrystalKind::TypeIDegenerate)
    throw ValidationError("TypeIKernel requires a type1 crystal");
  cfg_.validate();
  const QuadResult r =
      g_half_profile(0.0, pump_.sigma_p, crystal_.D_plus * crystal_.length_um, cfg_);
  profile_zero_ = r.value.real();
}

cplx TypeIKernel::value(double t_plus, double t_minus) const {
  return pi_type1(t_plus, t_minus, pump_, crystal_, cfg_);
}

double TypeIKernel::feature_width_minus() const {
  return std::min(2.0 / pump_.sigma_p, std::sqrt(std::abs(crystal_.D_second) * crystal_.length_um));
}

double TypeIKernel::extent_minus() const {
  return 6.0 * std::sqrt(std::abs(crystal_.D_second) * crystal_.length_um);
}

cplx TypeIKernel::t_plus_overlap(double delta) const {
  // Half-plane contributions carry the Fresnel phase of the t- integral.
  const double dpl = crystal_.D_plus * crystal_.length_um;
  const QuadResult up = g_half_profile(-delta, pump_.sigma_p, dpl, cfg_);
  const QuadResult lo = g_half_profile(delta, pump_.sigma_p, dpl, cfg_);
  if (!up.converged || !lo.converged)
    throw NumericError("type1 overlap profile did not converge", up.value.real() + lo.value.real(),
                       up.error_bound + lo.error_bound);
  const double s = crystal_.D_second > 0.0 ? 1.0 : -1.0;
  const cplx ph = std::polar(1.0, -0.25 * kPi * s);
  return (ph * up.value.real() + std::conj(ph) * lo.value.real()) /
         (std::sqrt(2.0) * profile_zero_);
}

cplx TypeIKernel::cross_overlap(const TermShift& a, const TermShift& b) const {
  // Pi is even in t-, so the mirror flag drops out.
  if (a.minus == b.minus) return t_plus_overlap(a.plus - b.plus);
  return grid_cross_overlap(a, b);
}

}  // namespace biphoton

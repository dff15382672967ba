#include <algorithm>
#include <cmath>

#include "biphoton/biphoton.hpp"
#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

// Relative distance inside which a sample counts as sitting on a support edge.
constexpr double kEdgeSnap = 1e-12;

double support_weight(double t_minus, double lo, double hi) {
  const double snap = kEdgeSnap * (hi - lo);
  if (t_minus < lo - snap || t_minus > hi + snap) return 0.0;
  if (std::abs(t_minus - lo) <= snap || std::abs(t_minus - hi) <= snap) return 0.5;
  return 1.0;
}

// erf(x2) - erf(x1) without cancellation in the tails.
double erf_diff(double x1, double x2) {
  if (x1 >= 0.0 && x2 >= 0.0) return std::erfc(x1) - std::erfc(x2);
  if (x1 <= 0.0 && x2 <= 0.0) return std::erfc(-x2) - std::erfc(-x1);
  return std::erf(x2) - std::erf(x1);
}

}  // namespace

cplx pi_type2(double t_plus, double t_minus, const PumpPulse& pump, const CrystalParams& crystal) {
  if (crystal.kind != CrystalKind::TypeII) throw ValidationError("pi_type2 requires a type2 crystal");
  const double dl = -crystal.D * crystal.length_um;
  const double w = support_weight(t_minus, std::min(0.0, dl), std::max(0.0, dl));
  if (w == 0.0) return {};
  const double x = t_plus - (crystal.D_plus / crystal.D) * t_minus;
  return w * std::exp(-0.25 * pump.sigma_p * pump.sigma_p * x * x);
}

TypeIIKernel::TypeIIKernel(PumpPulse pump, CrystalParams crystal)
    : BiphotonKernel(pump, crystal) {
  if (crystal_.kind != CrystalKind::TypeII) throw ValidationError("TypeIIKernel requires a type2 crystal");
  const double dl = -crystal_.D * crystal_.length_um;
  lo_ = std::min(0.0, dl);
  hi_ = std::max(0.0, dl);
}

cplx TypeIIKernel::value(double t_plus, double t_minus) const {
  return pi_type2(t_plus, t_minus, pump_, crystal_);
}

void TypeIIKernel::fill(const GridSpec& spec, const TermShift& shift, std::vector<cplx>& out) const {
  const std::size_t nm = static_cast<std::size_t>(spec.t_minus.count);
  out.assign(spec.size(), cplx{});
  for (int i = 0; i < spec.t_plus.count; ++i)
    for (std::size_t j = 0; j < nm; ++j)
      out[i * nm + j] = term_value(shift, spec.t_plus.at(i), spec.t_minus.at(static_cast<int>(j)));
}

double TypeIIKernel::feature_width_minus() const { return 2.0 / pump_.sigma_p; }

double TypeIIKernel::extent_minus() const { return hi_ - lo_; }

cplx TypeIIKernel::cross_overlap(const TermShift& a, const TermShift& b) const {
  // term = B(s (t- + m)) G(t+ + p - r s (t- + m)); the t+ integral of two
  // Gaussians leaves exp(-sigma^2 (alpha + beta t-)^2 / 8) on the common support.
  const double r = crystal_.D_plus / crystal_.D;
  const double sa = a.mirror ? -1.0 : 1.0;
  const double sb = b.mirror ? -1.0 : 1.0;
  auto window = [&](double s, double m) {
    return s > 0 ? std::pair{lo_ - m, hi_ - m} : std::pair{-hi_ - m, -lo_ - m};
  };
  const auto [a_lo, a_hi] = window(sa, a.minus);
  const auto [b_lo, b_hi] = window(sb, b.minus);
  const double A = std::max(a_lo, b_lo);
  const double B = std::min(a_hi, b_hi);
  if (!(B > A)) return {};
  const double alpha = (b.plus - a.plus) + r * (sa * a.minus - sb * b.minus);
  const double beta = r * (sa - sb);
  const double k = pump_.sigma_p / (2.0 * std::sqrt(2.0));
  double integral = 0.0;
  if (beta == 0.0) {
    integral = (B - A) * std::exp(-k * k * alpha * alpha);
  } else {
    const double x1 = k * (alpha + beta * A);
    const double x2 = k * (alpha + beta * B);
    integral = std::sqrt(kPi) / (2.0 * k * beta) * erf_diff(x1, x2);
  }
  return integral / (hi_ - lo_);
}

}  // namespace biphoton

#include <algorithm>
#include <cmath>

#include "biphoton/biphoton.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/parallel.hpp"

namespace biphoton {

namespace detail {

double chirp_split_point(double alpha, double L, const ChirpGrowth& growth) {
  if (growth.quadratic == 0.0 && growth.linear == 0.0) return L;
  const double aa = std::abs(alpha);
  double zc = L;
  for (int iter = 0; iter < 80; ++iter) {
    const double w0 = 1.0 / zc;
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = -48; k <= 48; ++k) {
      const double y = w0 * std::pow(10.0, k / 8.0);
      const double x = y / (w0 * w0 + y * y);  // |Im zeta| on the contour
      worst = std::max(worst, growth.quadratic * x * x + growth.linear * x - aa * y);
    }
    if (worst <= 1.0) return zc;
    zc *= 0.5;
  }
  return zc;
}

}  // namespace detail

BiphotonKernel::BiphotonKernel(PumpPulse pump, CrystalParams crystal)
    : pump_(pump), crystal_(crystal) {
  pump_.validate();
  crystal_.validate();
}

cplx BiphotonKernel::term_value(const TermShift& s, double t_plus, double t_minus) const {
  const double x = t_plus + s.plus;
  const double y = t_minus + s.minus;
  return s.mirror ? mirrored_value(x, y) : value(x, y);
}

void BiphotonKernel::fill(const GridSpec& spec, const TermShift& shift, std::vector<cplx>& out) const {
  const std::size_t nm = static_cast<std::size_t>(spec.t_minus.count);
  out.assign(spec.size(), cplx{});
  parallel_for(static_cast<std::size_t>(spec.t_plus.count), [&](std::size_t i) {
    const double tp = spec.t_plus.at(static_cast<int>(i));
    for (std::size_t j = 0; j < nm; ++j)
      out[i * nm + j] = term_value(shift, tp, spec.t_minus.at(static_cast<int>(j)));
  });
}

double BiphotonKernel::feature_width_plus() const { return 2.0 / pump_.sigma_p; }
double BiphotonKernel::feature_width_minus() const { return 2.0 / pump_.sigma_p; }

double BiphotonKernel::extent_plus() const {
  return std::abs(crystal_.D_plus) * crystal_.length_um + 6.0 / pump_.sigma_p;
}

double BiphotonKernel::extent_minus() const {
  return std::max(std::abs(crystal_.D) * crystal_.length_um,
                  6.0 * std::sqrt(std::abs(crystal_.D_second) * crystal_.length_um));
}

double BiphotonKernel::relative_norm(bool) const { return 1.0; }

cplx BiphotonKernel::cross_overlap(const TermShift& a, const TermShift& b) const {
  return grid_cross_overlap(a, b);
}

cplx BiphotonKernel::grid_cross_overlap(const TermShift& a, const TermShift& b,
                                        int points_per_feature) const {
  const GridSpec base = auto_grid_spec(*this, points_per_feature);
  auto cover = [](const Axis& ax, double s1, double s2) {
    const double lo_shift = std::min({0.0, s1, s2});
    const double hi_shift = std::max({0.0, s1, s2});
    const double h = ax.step;
    const double lo = h * std::floor((ax.start - hi_shift) / h + 1e-9);
    const double hi = h * std::ceil((ax.back() - lo_shift) / h - 1e-9);
    return Axis{lo, h, static_cast<int>(std::lround((hi - lo) / h)) + 1};
  };
  const GridSpec spec{cover(base.t_plus, a.plus, b.plus), cover(base.t_minus, a.minus, b.minus)};
  const BiphotonGrid ga = sample_grid(*this, spec, a);
  const BiphotonGrid gb = sample_grid(*this, spec, b);
  const BiphotonGrid g0 = sample_grid(*this, spec, {});
  if (!(g0.norm > 0.0)) throw ValidationError("kernel has zero norm on its grid");
  if (!(ga.norm > 0.0) || !(gb.norm > 0.0)) return {};
  return overlap(ga, gb) * std::sqrt(ga.norm * gb.norm) / g0.norm;
}

FrequencyAmplitude::FrequencyAmplitude(PumpPulse pump, CrystalParams crystal, FilterPair filters,
                                       bool mirrored)
    : pump_(pump), crystal_(crystal), filters_(filters), mirrored_(mirrored) {
  pump_.validate();
  crystal_.validate();
}

double FrequencyAmplitude::pump_factor(double nu_p) const {
  const double x = nu_p / pump_.sigma_p;
  return std::exp(-x * x);
}

double FrequencyAmplitude::kappa(double nu_p, double nu_minus) const {
  const double nm = mirrored_ ? -nu_minus : nu_minus;
  if (crystal_.kind == CrystalKind::TypeII)
    return nu_p * crystal_.D_plus + 0.5 * nm * crystal_.D;
  return nu_p * crystal_.D_plus + 0.25 * nm * nm * crystal_.D_second;
}

cplx FrequencyAmplitude::phase_matching(double nu_p, double nu_minus) const {
  // int_0^L exp(-i kappa z) dz
  const double L = crystal_.length_um;
  const double h = 0.5 * kappa(nu_p, nu_minus) * L;
  const double sinc = std::abs(h) < 1e-8 ? 1.0 - h * h / 6.0 : std::sin(h) / h;
  return L * sinc * std::polar(1.0, -h);
}

double FrequencyAmplitude::filter_factor(double nu_p, double nu_minus) const {
  const double nm = mirrored_ ? -nu_minus : nu_minus;
  const double half = 0.5 * pump_.omega_p;
  const SpectralFilter& f0 = mirrored_ ? filters_[1] : filters_[0];
  const SpectralFilter& f1 = mirrored_ ? filters_[0] : filters_[1];
  return f0.amplitude(half + 0.5 * (nu_p + nm)) * f1.amplitude(half + 0.5 * (nu_p - nm));
}

cplx FrequencyAmplitude::operator()(double nu_p, double nu_minus) const {
  return pump_factor(nu_p) * filter_factor(nu_p, nu_minus) * phase_matching(nu_p, nu_minus);
}

FrequencyAmplitude FrequencyAmplitude::mirrored() const {
  return FrequencyAmplitude(pump_, crystal_, filters_, !mirrored_);
}

std::shared_ptr<const BiphotonKernel> make_kernel(const PumpPulse& pump, const CrystalParams& crystal,
                                                  const FilterPair& filters, const QuadConfig& cfg) {
  if (!filters[0].infinite() || !filters[1].infinite())
    return std::make_shared<FilteredKernel>(pump, crystal, filters, cfg);
  if (crystal.kind == CrystalKind::TypeII) return std::make_shared<TypeIIKernel>(pump, crystal);
  return std::make_shared<TypeIKernel>(pump, crystal, cfg);
}

}  // namespace biphoton

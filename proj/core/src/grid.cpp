#include <algorithm>
#include <cmath>

#include "biphoton/biphoton.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/parallel.hpp"

namespace biphoton {

void Axis::validate(const char* name) const {
  if (count < 2) throw ValidationError(std::string(name) + " axis needs at least 2 points");
  if (!(step > 0.0) || !std::isfinite(step) || !std::isfinite(start))
    throw ValidationError(std::string(name) + " axis must be strictly increasing");
}

Axis Axis::span(double lo, double hi, int count) {
  if (count < 2 || !(hi > lo)) throw ValidationError("axis span needs lo < hi and count >= 2");
  return {lo, (hi - lo) / (count - 1), count};
}

void GridSpec::validate() const {
  t_plus.validate("t_plus");
  t_minus.validate("t_minus");
}

namespace {

std::vector<double> trapezoid_weights(const Axis& ax) {
  std::vector<double> w(static_cast<std::size_t>(ax.count), ax.step);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

bool same_axis(const Axis& a, const Axis& b) {
  auto close = [](double x, double y) {
    return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
  };
  return a.count == b.count && close(a.start, b.start) && close(a.step, b.step);
}

}  // namespace

void BiphotonGrid::compute_norm() {
  const auto wp = trapezoid_weights(t_plus);
  const auto wm = trapezoid_weights(t_minus);
  std::vector<double> rows(static_cast<std::size_t>(t_plus.count));
  for (int i = 0; i < t_plus.count; ++i) {
    std::vector<double> cells(static_cast<std::size_t>(t_minus.count));
    for (int j = 0; j < t_minus.count; ++j) cells[j] = std::norm(at(i, j)) * wm[j];
    rows[i] = wp[i] * pairwise_sum(cells.data(), cells.size());
  }
  norm = pairwise_sum(rows.data(), rows.size());
}

double BiphotonGrid::max_abs() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

void BiphotonGrid::scale(double factor) {
  for (auto& v : values) v *= factor;
  norm *= factor * factor;
}

cplx overlap(const BiphotonGrid& a, const BiphotonGrid& b) {
  if (!same_axis(a.t_plus, b.t_plus) || !same_axis(a.t_minus, b.t_minus))
    throw ValidationError("overlap requires identical grid axes");
  if (!(a.norm > 0.0) || !(b.norm > 0.0)) throw ValidationError("overlap of a zero-norm grid");
  const auto wp = trapezoid_weights(a.t_plus);
  const auto wm = trapezoid_weights(a.t_minus);
  std::vector<cplx> rows(static_cast<std::size_t>(a.t_plus.count));
  std::vector<cplx> cells(static_cast<std::size_t>(a.t_minus.count));
  for (int i = 0; i < a.t_plus.count; ++i) {
    for (int j = 0; j < a.t_minus.count; ++j) cells[j] = a.at(i, j) * std::conj(b.at(i, j)) * wm[j];
    rows[i] = wp[i] * pairwise_sum(cells.data(), cells.size());
  }
  return pairwise_sum(rows.data(), rows.size()) / std::sqrt(a.norm * b.norm);
}

namespace {

// Centre and +-half_extent lie midway between nodes, so a boxcar on any of
// them integrates exactly; two padding nodes per side.
Axis symmetric_axis(double half_extent, double max_step) {
  const int m = std::max(1, static_cast<int>(std::ceil(half_extent / max_step - 1e-9)));
  const double h = half_extent / m;
  return {-(m + 1.5) * h, h, 2 * m + 4};
}

}  // namespace

GridSpec auto_grid_spec(const BiphotonKernel& kernel, int points_per_feature) {
  if (points_per_feature < 1) throw ValidationError("points_per_feature must be positive");
  GridSpec g;
  g.t_plus = symmetric_axis(kernel.extent_plus(), kernel.feature_width_plus() / points_per_feature);
  g.t_minus =
      symmetric_axis(kernel.extent_minus(), kernel.feature_width_minus() / points_per_feature);
  return g;
}

void check_resolution(const GridSpec& spec, const BiphotonKernel& kernel, int points_per_feature) {
  spec.validate();
  const double slack = 1.0 + 1e-9;
  if (spec.t_plus.step > slack * kernel.feature_width_plus() / points_per_feature)
    throw ValidationError("grid too coarse in t_plus: need at least " +
                          std::to_string(points_per_feature) + " points across " +
                          std::to_string(kernel.feature_width_plus()) + " fs");
  if (spec.t_minus.step > slack * kernel.feature_width_minus() / points_per_feature)
    throw ValidationError("grid too coarse in t_minus: need at least " +
                          std::to_string(points_per_feature) + " points across " +
                          std::to_string(kernel.feature_width_minus()) + " fs");
}

BiphotonGrid sample_grid(const BiphotonKernel& kernel, const GridSpec& spec, const TermShift& shift) {
  spec.validate();
  BiphotonGrid g;
  g.t_plus = spec.t_plus;
  g.t_minus = spec.t_minus;
  kernel.fill(spec, shift, g.values);
  g.compute_norm();
  return g;
}

namespace {

BiphotonGrid peak_normalized(BiphotonGrid g) {
  const double peak = g.max_abs();
  if (!(peak > 0.0)) throw ValidationError("grid does not intersect the amplitude support");
  g.scale(1.0 / peak);
  return g;
}

}  // namespace

BiphotonGrid pi_grid(CrystalKind kind, const PumpPulse& pump, const CrystalParams& crystal,
                     const GridSpec& spec, const QuadConfig& cfg) {
  if (kind != crystal.kind) throw ValidationError("pi_grid kind does not match crystal.kind");
  const auto kernel = make_kernel(pump, crystal, {}, cfg);
  check_resolution(spec, *kernel);
  return peak_normalized(sample_grid(*kernel, spec));
}

BiphotonGrid pi_filtered(CrystalKind kind, const PumpPulse& pump, const CrystalParams& crystal,
                         const FilterPair& filters, const GridSpec& spec, const QuadConfig& cfg,
                         std::optional<FourierSpec> fourier) {
  if (kind != crystal.kind) throw ValidationError("pi_filtered kind does not match crystal.kind");
  const FilteredKernel kernel(pump, crystal, filters, cfg);
  check_resolution(spec, kernel);
  BiphotonGrid g;
  g.t_plus = spec.t_plus;
  g.t_minus = spec.t_minus;
  kernel.fill_with(spec, {}, fourier ? *fourier : kernel.auto_fourier(spec), g.values);
  g.compute_norm();
  return peak_normalized(std::move(g));
}

}  // namespace biphoton

#include <algorithm>
#include <cmath>

#include "biphoton/biphoton.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/parallel.hpp"

namespace biphoton {

namespace {

constexpr std::size_t kMarginalCacheLimit = 4096;

int next_pow2(double n) {
  int p = 2;
  while (p < n) p *= 2;
  return p;
}

}  // namespace

FilteredKernel::FilteredKernel(PumpPulse pump, CrystalParams crystal, FilterPair filters,
                               QuadConfig cfg, double max_shift_plus, double max_shift_minus)
    : BiphotonKernel(pump, crystal),
      filters_(filters),
      cfg_(cfg),
      max_shift_plus_(max_shift_plus),
      max_shift_minus_(max_shift_minus) {
  cfg_.validate();
  for (const auto& f : filters_)
    if (!f.infinite()) f.validate();
  const double sf = min_filter_sigma();
  if (max_shift_minus_ < 0.0)
    max_shift_minus_ = 2.0 * (std::abs(crystal_.D) * crystal_.length_um +
                              (std::isfinite(sf) ? 16.0 / sf : 0.0) +
                              6.0 * std::sqrt(std::abs(crystal_.D_second) * crystal_.length_um));
  if (!(max_shift_plus_ >= 0.0)) throw ValidationError("max_shift_plus must be non-negative");
}

double FilteredKernel::min_filter_sigma() const {
  return std::min(filters_[0].sigma, filters_[1].sigma);
}

double FilteredKernel::feature_width_plus() const { return 2.0 / pump_.sigma_p; }

double FilteredKernel::feature_width_minus() const {
  const double w = 2.0 / pump_.sigma_p;
  if (crystal_.kind == CrystalKind::TypeII) return w;
  return std::min(w, std::sqrt(std::abs(crystal_.D_second) * crystal_.length_um));
}

double FilteredKernel::extent_plus() const {
  const double sf = min_filter_sigma();
  return BiphotonKernel::extent_plus() + (std::isfinite(sf) ? 8.0 / sf : 0.0);
}

double FilteredKernel::extent_minus() const {
  const double sf = min_filter_sigma();
  return std::abs(crystal_.D) * crystal_.length_um +
         6.0 * std::sqrt(std::abs(crystal_.D_second) * crystal_.length_um) +
         (std::isfinite(sf) ? 16.0 / sf : 0.0);
}

cplx FilteredKernel::synthesis_scale() const {
  // Ratio between the Fourier route and the raw time-domain kernels.
  const double sp = pump_.sigma_p;
  const double pre = std::sqrt(kPi) * sp / (4.0 * kPi * kPi);
  if (crystal_.kind == CrystalKind::TypeII) return pre * 4.0 * kPi / std::abs(crystal_.D);
  return pre * std::sqrt(cplx(4.0 * kPi, 0.0) / cplx(0.0, crystal_.D_second));
}

cplx FilteredKernel::h_column(double nu_p, double t_minus, bool mirror) const {
  const SpectralFilter& f0 = mirror ? filters_[1] : filters_[0];
  const SpectralFilter& f1 = mirror ? filters_[0] : filters_[1];
  const double tm = mirror ? -t_minus : t_minus;
  const double L = crystal_.length_um;
  const double dp = crystal_.D_plus;
  const bool type2 = crystal_.kind == CrystalKind::TypeII;
  const double D = type2 ? crystal_.D : 0.0;
  const double D2 = type2 ? 0.0 : crystal_.D_second;

  if (f0.infinite() && f1.infinite()) {
    if (type2) {
      const double dl = -D * L;
      const double lo = std::min(0.0, dl);
      const double hi = std::max(0.0, dl);
      const double snap = 1e-12 * (hi - lo);
      if (tm < lo - snap || tm > hi + snap) return {};
      const double w = (std::abs(tm - lo) <= snap || std::abs(tm - hi) <= snap) ? 0.5 : 1.0;
      return w * 4.0 * kPi / std::abs(D) * std::polar(1.0, nu_p * dp * tm / D);
    }
    auto f = [&](cplx z) { return std::exp(cplx(0.0, -nu_p * dp) * z); };
    const QuadResult r =
        chirp_integral(f, tm * tm / (4.0 * D2), L, {0.0, std::abs(nu_p * dp)}, cfg_);
    if (!r.converged)
      throw NumericError("filtered amplitude chirp integral did not converge", std::abs(r.value),
                         r.error_bound);
    return std::sqrt(cplx(4.0 * kPi, 0.0) / cplx(0.0, D2)) * r.value;
  }

  const double half = 0.5 * pump_.omega_p;
  const double g0 = f0.infinite() ? 0.0 : 1.0 / (f0.sigma * f0.sigma);
  const double g1 = f1.infinite() ? 0.0 : 1.0 / (f1.sigma * f1.sigma);
  const double p0 = f0.infinite() ? 0.0 : 0.5 * nu_p - (f0.center - half);
  const double p1 = f1.infinite() ? 0.0 : 0.5 * nu_p - (f1.center - half);
  const double c = g0 * p0 * p0 + g1 * p1 * p1;
  const double br = g0 * p0 - g1 * p1;
  // Gaussian nu_- integral: int exp(-a v^2 - b v - c) dv = sqrt(pi/a) exp(b^2/(4a) - c)
  auto integrand = [&](double u) {
    const double z = L * u * u;
    const cplx a(0.25 * (g0 + g1), 0.25 * D2 * z);
    const cplx b(br, 0.5 * (D * z + tm));
    return 2.0 * L * u * std::sqrt(kPi / a) * std::exp(b * b / (4.0 * a) - c - cplx(0.0, nu_p * dp * z));
  };
  const QuadResult r = integrate_1d(integrand, 0.0, 1.0, cfg_);
  if (!r.converged && r.error_bound > 1e-3 * std::abs(r.value) + 1e-300)
    throw NumericError("filtered amplitude z integral did not converge", std::abs(r.value),
                       r.error_bound);
  return r.value;
}

FourierSpec FilteredKernel::auto_fourier(const GridSpec& spec) const {
  FourierSpec fs;
  fs.extent = 8.0 * pump_.sigma_p;
  const double period = (spec.t_plus.back() - spec.t_plus.start) + 2.0 * extent_plus();
  double dnu = 2.0 * kPi / period;
  dnu = std::min(dnu, pump_.sigma_p / 16.0);
  const double sf = min_filter_sigma();
  if (std::isfinite(sf)) dnu = std::min(dnu, 2.0 * sf / 16.0);
  fs.n_nu = next_pow2(2.0 * fs.extent / dnu + 1.0);
  return fs;
}

void FilteredKernel::fill_with(const GridSpec& spec, const TermShift& shift, const FourierSpec& fs,
                               std::vector<cplx>& out) const {
  spec.validate();
  if (fs.n_nu < 2 || !(fs.extent > 0.0)) throw ValidationError("invalid Fourier grid");
  const int n = fs.n_nu;
  const double dnu = 2.0 * fs.extent / (n - 1);
  const double sf = min_filter_sigma();
  const double finest = std::isfinite(sf) ? std::min(pump_.sigma_p, 2.0 * sf) : pump_.sigma_p;
  if (dnu > finest / 16.0 * (1.0 + 1e-9))
    throw ValidationError("frequency grid under-resolves filter width: step " + std::to_string(dnu) +
                          " rad/fs > " + std::to_string(finest / 16.0));
  const double period = (spec.t_plus.back() - spec.t_plus.start) + 2.0 * extent_plus();
  if (2.0 * kPi / dnu < period * (1.0 - 1e-9))
    throw ValidationError("frequency grid too coarse: t_plus window would alias");

  std::vector<double> nu(n);
  std::vector<double> weight(n);
  for (int k = 0; k < n; ++k) {
    nu[k] = -fs.extent + k * dnu;
    const double x = nu[k] / pump_.sigma_p;
    weight[k] = dnu * std::exp(-x * x) * ((k == 0 || k == n - 1) ? 0.5 : 1.0);
  }
  const cplx scale = 1.0 / (4.0 * kPi * kPi * synthesis_scale());
  const std::size_t nm = static_cast<std::size_t>(spec.t_minus.count);
  out.assign(spec.size(), cplx{});
  parallel_for(nm, [&](std::size_t j) {
    const double tm = spec.t_minus.at(static_cast<int>(j)) + shift.minus;
    std::vector<cplx> coef(n);
    for (int k = 0; k < n; ++k) {
      if (weight[k] < 1e-300) continue;
      coef[k] = weight[k] * h_column(nu[k], tm, shift.mirror) * std::polar(1.0, -nu[k] * shift.plus);
    }
    for (int i = 0; i < spec.t_plus.count; ++i) {
      const double tp = spec.t_plus.at(i);
      const cplx rot = std::polar(1.0, -dnu * tp);
      cplx ph = std::polar(1.0, -nu[0] * tp);
      cplx acc{};
      for (int k = 0; k < n; ++k) {
        acc += coef[k] * ph;
        ph *= rot;
      }
      out[static_cast<std::size_t>(i) * nm + j] = acc * scale;
    }
  });
}

void FilteredKernel::fill(const GridSpec& spec, const TermShift& shift, std::vector<cplx>& out) const {
  fill_with(spec, shift, auto_fourier(spec), out);
}

cplx FilteredKernel::value(double t_plus, double t_minus) const {
  const GridSpec spec{Axis{t_plus, 1.0, 2}, Axis{t_minus, 1.0, 2}};
  std::vector<cplx> out;
  fill(spec, {}, out);
  return out[0];
}

cplx FilteredKernel::mirrored_value(double t_plus, double t_minus) const {
  const GridSpec spec{Axis{t_plus, 1.0, 2}, Axis{t_minus, 1.0, 2}};
  std::vector<cplx> out;
  fill(spec, TermShift{0.0, 0.0, true}, out);
  return out[0];
}

const FilteredKernel::Spectral& FilteredKernel::spectral() const {
  std::call_once(spectral_once_, [&] {
    auto sp = std::make_unique<Spectral>();
    const double L = crystal_.length_um;
    const double sf = min_filter_sigma();
    const double sfin = std::isfinite(sf) ? sf : pump_.sigma_p;
    const double w_plus = std::abs(crystal_.D_plus) * L + 12.0 / pump_.sigma_p + 12.0 / sfin;
    const double w_minus = std::abs(crystal_.D) * L +
                           12.0 * std::sqrt(std::abs(crystal_.D_second) * L) + 32.0 / sfin;
    const double dnu_p = 2.0 * kPi / (2.0 * (w_plus + max_shift_plus_));
    const double dnu_m = 4.0 * kPi / (2.0 * (w_minus + max_shift_minus_));
    const double ext_p = 6.0 * pump_.sigma_p;
    const double half = 0.5 * pump_.omega_p;
    double ext_m = 6.0 * pump_.sigma_p;
    if (std::isfinite(sf)) {
      const bool first = filters_[0].sigma <= filters_[1].sigma;
      const SpectralFilter& f = first ? filters_[0] : filters_[1];
      ext_m += 2.0 * std::abs(f.center - half) + 12.0 * f.sigma;
    } else {
      ext_m += 16.0 * pump_.sigma_p;
    }
    const int np = 2 * static_cast<int>(std::ceil(ext_p / dnu_p)) + 1;
    const int nmn = 2 * static_cast<int>(std::ceil(ext_m / dnu_m)) + 1;
    sp->nu_p.resize(np);
    sp->nu_m.resize(nmn);
    for (int k = 0; k < np; ++k) sp->nu_p[k] = (k - (np - 1) / 2) * dnu_p;
    for (int l = 0; l < nmn; ++l) sp->nu_m[l] = (l - (nmn - 1) / 2) * dnu_m;
    sp->alias_plus = max_shift_plus_;
    sp->alias_minus = max_shift_minus_;
    const FrequencyAmplitude direct(pump_, crystal_, filters_);
    const FrequencyAmplitude mirrored = direct.mirrored();
    for (int m = 0; m < 2; ++m) {
      const FrequencyAmplitude& amp = m == 0 ? direct : mirrored;
      auto& phi = sp->phi[m];
      phi.assign(static_cast<std::size_t>(np) * nmn, cplx{});
      parallel_for(static_cast<std::size_t>(np), [&](std::size_t k) {
        for (int l = 0; l < nmn; ++l) phi[k * nmn + l] = amp(sp->nu_p[k], sp->nu_m[l]);
      });
      std::vector<double> mag(phi.size());
      for (std::size_t i = 0; i < phi.size(); ++i) mag[i] = std::norm(phi[i]);
      sp->norm[m] = pairwise_sum(mag.data(), mag.size());
    }
    spectral_ = std::move(sp);
  });
  return *spectral_;
}

double FilteredKernel::relative_norm(bool mirror) const {
  if (filters_[0].infinite() && filters_[1].infinite()) return 1.0;
  const Spectral& sp = spectral();
  return sp.norm[mirror ? 1 : 0] / sp.norm[0];
}

std::vector<cplx> FilteredKernel::marginal(bool ma, bool mb, double dm) const {
  const auto key = std::make_tuple(ma, mb, dm);
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    const auto it = marginal_cache_.find(key);
    if (it != marginal_cache_.end()) return it->second;
  }
  const Spectral& sp = spectral();
  const std::size_t np = sp.nu_p.size();
  const std::size_t nmn = sp.nu_m.size();
  const auto& pa = sp.phi[ma ? 1 : 0];
  const auto& pb = sp.phi[mb ? 1 : 0];
  std::vector<cplx> ph(nmn);
  for (std::size_t l = 0; l < nmn; ++l) ph[l] = std::polar(1.0, -0.5 * sp.nu_m[l] * dm);
  std::vector<cplx> out(np);
  std::vector<cplx> cells(nmn);
  for (std::size_t k = 0; k < np; ++k) {
    for (std::size_t l = 0; l < nmn; ++l)
      cells[l] = pa[k * nmn + l] * std::conj(pb[k * nmn + l]) * ph[l];
    out[k] = pairwise_sum(cells.data(), nmn);
  }
  std::lock_guard<std::mutex> lock(cache_mutex_);
  if (marginal_cache_.size() >= kMarginalCacheLimit) marginal_cache_.clear();
  marginal_cache_.emplace(key, out);
  return out;
}

cplx FilteredKernel::cross_overlap(const TermShift& a, const TermShift& b) const {
  if (filters_[0].infinite() && filters_[1].infinite()) {
    if (crystal_.kind == CrystalKind::TypeII) return TypeIIKernel(pump_, crystal_).cross_overlap(a, b);
    return TypeIKernel(pump_, crystal_, cfg_).cross_overlap(a, b);
  }
  const Spectral& sp = spectral();
  const double dp = a.plus - b.plus;
  const double dm = a.minus - b.minus;
  if (std::abs(dp) > sp.alias_plus * (1.0 + 1e-9) || std::abs(dm) > sp.alias_minus * (1.0 + 1e-9))
    throw ValidationError("delay exceeds the kernel's spectral grid extent (|dT_p| <= " +
                          std::to_string(sp.alias_plus) + " fs, |dtau| <= " +
                          std::to_string(sp.alias_minus) + " fs)");
  const std::vector<cplx> m = marginal(a.mirror, b.mirror, dm);
  std::vector<cplx> cells(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) cells[k] = m[k] * std::polar(1.0, -sp.nu_p[k] * dp);
  return pairwise_sum(cells.data(), cells.size()) / sp.norm[0];
}

}  // namespace biphoton

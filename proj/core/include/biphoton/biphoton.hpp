#pragma once

#include <array>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "biphoton/quadrature.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

using FilterPair = std::array<SpectralFilter, 2>;

struct Axis {
  double start = 0.0;
  double step = 1.0;
  int count = 0;

  double at(int i) const { return start + step * i; }
  double back() const { return at(count - 1); }
  void validate(const char* name) const;

  static Axis span(double lo, double hi, int count);
};

struct GridSpec {
  Axis t_plus;
  Axis t_minus;

  void validate() const;
  std::size_t size() const {
    return static_cast<std::size_t>(t_plus.count) * static_cast<std::size_t>(t_minus.count);
  }
};

// Row-major: values[i * t_minus.count + j] is Pi(t_plus[i], t_minus[j]).
struct BiphotonGrid {
  Axis t_plus;
  Axis t_minus;
  std::vector<cplx> values;
  double norm = 0.0;  // trapezoid integral of |Pi|^2

  cplx at(int i, int j) const { return values[static_cast<std::size_t>(i) * t_minus.count + j]; }
  GridSpec spec() const { return {t_plus, t_minus}; }
  void compute_norm();
  double max_abs() const;
  void scale(double factor);
};

// Normalized trapezoid inner product sum a conj(b) / sqrt(norm_a norm_b).
cplx overlap(const BiphotonGrid& a, const BiphotonGrid& b);

// One pathway: Pi_m(t+ + plus, t- + minus); mirror reflects t- -> -t- and
// exchanges which detector sees which photon.
struct TermShift {
  double plus = 0.0;
  double minus = 0.0;
  bool mirror = false;
};

// Peak-one type-II amplitude. Support t- in [min(0,-DL), max(0,-DL)]; exact
// edges take the mean of the one-sided limits.
cplx pi_type2(double t_plus, double t_minus, const PumpPulse& pump, const CrystalParams& crystal);

// int_0^L z^-1/2 exp(-sigma^2 (t+ + D+ z)^2 / 4) exp(i t-^2 / (4 D'' z)) dz
QuadResult pi_type1_result(double t_plus, double t_minus, const PumpPulse& pump,
                           const CrystalParams& crystal, const QuadConfig& cfg = {});
cplx pi_type1(double t_plus, double t_minus, const PumpPulse& pump, const CrystalParams& crystal,
              const QuadConfig& cfg = {});

// Bound on log|f(zeta)| along Im zeta: quadratic * x^2 + linear * |x|.
struct ChirpGrowth {
  double quadratic = 0.0;
  double linear = 0.0;
};

namespace detail {
double chirp_split_point(double alpha, double L, const ChirpGrowth& growth);
}

// int_0^L z^-1/2 f(z) exp(i alpha / z) dz for f analytic near [0, L].
// [z_c, L] is integrated in u = sqrt(z/L); [0, z_c] is mapped to w = 1/z and
// the w contour is turned into the half plane where exp(i alpha w) decays.
template <class F>
QuadResult chirp_integral(F&& f, double alpha, double L, const ChirpGrowth& growth,
                          const QuadConfig& cfg) {
  const double sqL = std::sqrt(L);
  const cplx I(0.0, 1.0);
  auto part_a = [&](double u_lo, const QuadConfig& c) {
    auto g = [&](double u) {
      const double z = L * u * u;
      cplx v = f(cplx(z, 0.0));
      if (alpha != 0.0) v *= std::polar(1.0, alpha / z);
      return 2.0 * sqL * v;
    };
    return integrate_1d(g, u_lo, 1.0, c);
  };
  if (alpha == 0.0) return part_a(0.0, cfg);

  const double zc = detail::chirp_split_point(alpha, L, growth);
  const double w0 = 1.0 / zc;
  const double s = alpha > 0.0 ? 1.0 : -1.0;
  const double aa = std::abs(alpha);
  const cplx pref = I * s * std::polar(1.0, alpha * w0);
  auto part_b = [&](const QuadConfig& c) {
    auto g = [&](double t) {
      const double r = t / (1.0 - t);
      const double y = w0 * r * r;
      const double damp = std::exp(-aa * y);
      if (damp == 0.0) return cplx{};
      const double jac = 2.0 * w0 * t / ((1.0 - t) * (1.0 - t) * (1.0 - t));
      const cplx w(w0, s * y);
      return std::pow(w, -1.5) * f(1.0 / w) * (damp * jac);
    };
    QuadResult r = integrate_1d(g, 0.0, 1.0, c);
    r.value *= pref;
    return r;
  };
  const double u_c = std::sqrt(zc / L);
  // Each part gets half of the budget.
  auto run = [&](double abs_tol, double rel_tol) {
    QuadConfig c = cfg;
    c.abs_tol = 0.5 * abs_tol;
    c.rel_tol = 0.5 * rel_tol;
    QuadResult total = part_b(c);
    if (u_c < 1.0) total += part_a(u_c, c);
    return total;
  };
  auto tol = [&](const QuadResult& r) {
    return std::max(cfg.abs_tol, cfg.rel_tol * std::abs(r.value));
  };
  QuadResult total = run(cfg.abs_tol, cfg.rel_tol);
  double shrink = 1.0;
  for (int retry = 0; retry < 3 && total.error_bound > tol(total); ++retry) {
    // Parts may cancel: tighten both budgets against the size of the sum.
    shrink *= 0.125;
    total = run(shrink * tol(total), shrink * cfg.rel_tol);
  }
  total.converged = total.error_bound <= tol(total);
  return total;
}

// Phi(nu_p, nu_-) = pump Gaussian x phase-matching integral x filters.
// nu_o = (nu_p + nu_-)/2 passes filter 0, nu_e = (nu_p - nu_-)/2 filter 1.
class FrequencyAmplitude {
 public:
  FrequencyAmplitude(PumpPulse pump, CrystalParams crystal, FilterPair filters,
                     bool mirrored = false);

  cplx operator()(double nu_p, double nu_minus) const;
  double kappa(double nu_p, double nu_minus) const;
  cplx phase_matching(double nu_p, double nu_minus) const;
  double filter_factor(double nu_p, double nu_minus) const;
  double pump_factor(double nu_p) const;

  // Spectrum of the detector-exchanged amplitude Pi(t+, -t-).
  FrequencyAmplitude mirrored() const;

  const FilterPair& filters() const { return filters_; }

 private:
  PumpPulse pump_;
  CrystalParams crystal_;
  FilterPair filters_;
  bool mirrored_;
};

class BiphotonKernel {
 public:
  BiphotonKernel(PumpPulse pump, CrystalParams crystal);
  virtual ~BiphotonKernel() = default;

  const PumpPulse& pump() const { return pump_; }
  const CrystalParams& crystal() const { return crystal_; }
  CrystalKind kind() const { return crystal_.kind; }

  virtual cplx value(double t_plus, double t_minus) const = 0;
  virtual cplx mirrored_value(double t_plus, double t_minus) const { return value(t_plus, -t_minus); }
  cplx term_value(const TermShift& s, double t_plus, double t_minus) const;

  // Samples one pathway on a grid, values in row-major order.
  virtual void fill(const GridSpec& spec, const TermShift& shift, std::vector<cplx>& out) const;

  // Smallest structure widths that a grid must resolve.
  virtual double feature_width_plus() const;
  virtual double feature_width_minus() const;
  // Symmetric half extents of the auto grid.
  virtual double extent_plus() const;
  virtual double extent_minus() const;

  // Norm of the mirrored pathway relative to the direct one.
  virtual double relative_norm(bool mirror) const;
  // <a, b> / <Pi, Pi>, integrated over all t+ and t-.
  virtual cplx cross_overlap(const TermShift& a, const TermShift& b) const;
  // Same inner product from sampled grids; valid for any kernel.
  cplx grid_cross_overlap(const TermShift& a, const TermShift& b, int points_per_feature = 16) const;

  virtual std::string description() const = 0;

 protected:
  PumpPulse pump_;
  CrystalParams crystal_;
};

class TypeIIKernel final : public BiphotonKernel {
 public:
  TypeIIKernel(PumpPulse pump, CrystalParams crystal);

  cplx value(double t_plus, double t_minus) const override;
  void fill(const GridSpec& spec, const TermShift& shift, std::vector<cplx>& out) const override;
  double feature_width_minus() const override;
  double extent_minus() const override;
  cplx cross_overlap(const TermShift& a, const TermShift& b) const override;
  std::string description() const override { return "type2"; }

  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

class TypeIKernel final : public BiphotonKernel {
 public:
  TypeIKernel(PumpPulse pump, CrystalParams crystal, QuadConfig cfg = {});

  cplx value(double t_plus, double t_minus) const override;
  cplx mirrored_value(double t_plus, double t_minus) const override { return value(t_plus, t_minus); }
  double feature_width_minus() const override;
  double extent_minus() const override;
  // Closed path for pure t+ shifts; grid fallback otherwise.
  cplx cross_overlap(const TermShift& a, const TermShift& b) const override;
  std::string description() const override { return "type1"; }

  // Normalized overlap of Pi(t+ + delta) with Pi(t+).
  cplx t_plus_overlap(double delta) const;
  const QuadConfig& quad() const { return cfg_; }

 private:
  QuadConfig cfg_;
  double profile_zero_;
};

// Discrete Fourier synthesis controls for filtered amplitudes.
struct FourierSpec {
  int n_nu = 0;         // power of two, 0 = automatic
  double extent = 0.0;  // nu_p half range (rad/fs), 0 = 8 sigma_p
};

class FilteredKernel final : public BiphotonKernel {
 public:
  FilteredKernel(PumpPulse pump, CrystalParams crystal, FilterPair filters, QuadConfig cfg = {},
                 double max_shift_plus = 4000.0, double max_shift_minus = -1.0);

  cplx value(double t_plus, double t_minus) const override;
  cplx mirrored_value(double t_plus, double t_minus) const override;
  void fill(const GridSpec& spec, const TermShift& shift, std::vector<cplx>& out) const override;
  double feature_width_plus() const override;
  double feature_width_minus() const override;
  double extent_plus() const override;
  double extent_minus() const override;
  double relative_norm(bool mirror) const override;
  cplx cross_overlap(const TermShift& a, const TermShift& b) const override;
  std::string description() const override { return "filtered"; }

  const FilterPair& filters() const { return filters_; }
  FourierSpec auto_fourier(const GridSpec& spec) const;
  void fill_with(const GridSpec& spec, const TermShift& shift, const FourierSpec& fs,
                 std::vector<cplx>& out) const;

  // nu_- integral done in closed form, z integral by quadrature.
  cplx h_column(double nu_p, double t_minus, bool mirror) const;

 private:
  struct Spectral {
    std::vector<double> nu_p;
    std::vector<double> nu_m;
    std::array<std::vector<cplx>, 2> phi;  // direct, mirrored
    std::array<double, 2> norm{};
    double alias_plus = 0.0;
    double alias_minus = 0.0;
  };
  const Spectral& spectral() const;
  std::vector<cplx> marginal(bool ma, bool mb, double dm) const;
  double min_filter_sigma() const;
  cplx synthesis_scale() const;

  FilterPair filters_;
  QuadConfig cfg_;
  double max_shift_plus_;
  double max_shift_minus_;
  mutable std::once_flag spectral_once_;
  mutable std::unique_ptr<Spectral> spectral_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::tuple<bool, bool, double>, std::vector<cplx>> marginal_cache_;
};

std::shared_ptr<const BiphotonKernel> make_kernel(const PumpPulse& pump,
                                                  const CrystalParams& crystal,
                                                  const FilterPair& filters = {},
                                                  const QuadConfig& cfg = {});

// Auto extents from the kernel plus padding. Nodes sit half a step off zero
// and +-extent, so type-II support edges fall midway between nodes.
GridSpec auto_grid_spec(const BiphotonKernel& kernel, int points_per_feature = 16);
void check_resolution(const GridSpec& spec, const BiphotonKernel& kernel, int points_per_feature = 16);

// Raw samples of one pathway.
BiphotonGrid sample_grid(const BiphotonKernel& kernel, const GridSpec& spec, const TermShift& shift = {});

// Peak-normalized grids.
BiphotonGrid pi_grid(CrystalKind kind, const PumpPulse& pump, const CrystalParams& crystal,
                     const GridSpec& spec, const QuadConfig& cfg = {});
BiphotonGrid pi_filtered(CrystalKind kind, const PumpPulse& pump, const CrystalParams& crystal,
                         const FilterPair& filters, const GridSpec& spec, const QuadConfig& cfg = {},
                         std::optional<FourierSpec> fourier = std::nullopt);

}  // namespace biphoton

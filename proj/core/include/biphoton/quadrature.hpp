#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "biphoton/units.hpp"

namespace biphoton {

using cplx = std::complex<double>;

struct QuadConfig {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  int max_subdivisions = 10000;

  void validate() const;
  QuadConfig tightened(double factor) const;
};

struct QuadResult {
  cplx value{};
  double error_bound = 0.0;
  int subdivisions_used = 0;
  bool converged = false;

  QuadResult& operator+=(const QuadResult& o);
};

namespace detail {

// Gauss-Kronrod 10/21 abscissae and weights.
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525452890, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a;
  double b;
  cplx value;
  double error;
};

inline double qk_error(double diff, double resabs, double resasc) {
  double err = std::abs(diff);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);
  return err;
}

template <class F>
Panel gk21(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const cplx fc = cplx(f(c));
  cplx resk = fc * kWgk[10];
  cplx resg{};
  double absk_re = std::abs(fc.real()) * kWgk[10];
  double absk_im = std::abs(fc.imag()) * kWgk[10];
  std::array<cplx, 10> f1{};
  std::array<cplx, 10> f2{};
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kXgk[j];
    f1[j] = cplx(f(c - dx));
    f2[j] = cplx(f(c + dx));
    const cplx s = f1[j] + f2[j];
    resk += kWgk[j] * s;
    absk_re += kWgk[j] * (std::abs(f1[j].real()) + std::abs(f2[j].real()));
    absk_im += kWgk[j] * (std::abs(f1[j].imag()) + std::abs(f2[j].imag()));
    if (j % 2 == 1) resg += kWg[j / 2] * s;
  }
  const cplx mean = resk * 0.5;
  double asc_re = kWgk[10] * std::abs(fc.real() - mean.real());
  double asc_im = kWgk[10] * std::abs(fc.imag() - mean.imag());
  for (int j = 0; j < 10; ++j) {
    asc_re += kWgk[j] * (std::abs(f1[j].real() - mean.real()) + std::abs(f2[j].real() - mean.real()));
    asc_im += kWgk[j] * (std::abs(f1[j].imag() - mean.imag()) + std::abs(f2[j].imag() - mean.imag()));
  }
  const double ah = std::abs(h);
  const cplx diff = (resk - resg) * h;
  const double err_re = qk_error(diff.real(), absk_re * ah, asc_re * ah);
  const double err_im = qk_error(diff.imag(), absk_im * ah, asc_im * ah);
  return {a, b, resk * h, std::hypot(err_re, err_im)};
}

cplx ordered_sum(std::vector<Panel>& panels);

}  // namespace detail

// Globally adaptive Gauss-Kronrod (G10/K21) on a complex or real integrand.
template <class F>
QuadResult integrate_1d(F&& f, double a, double b, const QuadConfig& cfg) {
  cfg.validate();
  QuadResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::vector<detail::Panel> heap;
  heap.reserve(64);
  auto cmp = [](const detail::Panel& x, const detail::Panel& y) { return x.error < y.error; };
  heap.push_back(detail::gk21(f, a, b));
  cplx total = heap.front().value;
  double err = heap.front().error;
  int splits = 0;
  auto tolerance = [&](const cplx& v) { return std::max(cfg.abs_tol, cfg.rel_tol * std::abs(v)); };
  while (err > tolerance(total) && splits < cfg.max_subdivisions) {
    std::pop_heap(heap.begin(), heap.end(), cmp);
    const detail::Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {  // interval exhausted at machine precision
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), cmp);
      break;
    }
    const detail::Panel left = detail::gk21(f, worst.a, mid);
    const detail::Panel right = detail::gk21(f, mid, worst.b);
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), cmp);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), cmp);
    ++splits;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    if ((splits & 63) == 0) {
      err = 0.0;
      for (const auto& p : heap) err += p.error;
    }
  }
  err = 0.0;
  for (const auto& p : heap) err += p.error;
  out.value = detail::ordered_sum(heap);
  out.error_bound = err;
  out.subdivisions_used = splits;
  out.converged = std::isfinite(err) && err <= tolerance(out.value);
  return out;
}

// Integrand of the normalized type-I cross-correlation on one side of the
// diagonal: I(T) = int_0^1 (1 - y^2)/2 exp(-sigma^2 (D+ L y^2 - T)^2 / 8) dy.
// Obtained by integrating out the centre of mass of (z1, z2).
QuadResult g_half_profile(double T_p, double sigma_p, double dplus_L, const QuadConfig& cfg);

// Diagonal-split halves of g: upper is u1 > u2, lower is u1 < u2.
struct GEnvelopeHalves {
  double upper = 0.0;
  double lower = 0.0;
  double error_bound = 0.0;
  int evaluations = 0;
  double total() const { return upper + lower; }
};

// Nested adaptive evaluation of the desingularized double integral.
GEnvelopeHalves g_envelope_halves(double T_p, double sigma_p, double dplus_L,
                                  const QuadConfig& cfg);

// g(T_p) for a degenerate type-I crystal, throws NumericError when not converged.
double g_envelope_integral(double T_p, const PumpPulse& pump, const CrystalParams& crystal,
                           const QuadConfig& cfg = {});

// Desingularized integrand on one diagonal half in (u1, v) coordinates,
// u2 = u1 (1 - v^2); exposed for convergence studies.
double g_desingularized_integrand(double u1, double v, double T_p, double sigma_p,
                                  double dplus_L);

}  // namespace biphoton

#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's numerics; only plain loops and textbook formulas.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr double c_um_fs = 0.299792458;

// --- BBO, n^2 = A + B / (lambda^2 - C) - D lambda^2 (lambda in um) ---------

struct Sellmeier {
  double A, B, C, D;
  double n(double lam) const { return std::sqrt(A + B / (lam * lam - C) - D * lam * lam); }
};
inline constexpr Sellmeier bbo_o{2.7405, 0.0184, 0.0179, 0.0155};
inline constexpr Sellmeier bbo_e{2.3730, 0.0128, 0.0156, 0.0044};

inline double n_e_theta(double lam, double theta) {
  const double no = bbo_o.n(lam), ne = bbo_e.n(lam);
  const double c = std::cos(theta), s = std::sin(theta);
  return 1.0 / std::sqrt(c * c / (no * no) + s * s / (ne * ne));
}

// Wavenumber K(omega) = omega n / c with lambda = 2 pi c / omega.
inline double K(const std::function<double(double)>& n_of_lambda, double w) {
  return w * n_of_lambda(2.0 * pi * c_um_fs / w) / c_um_fs;
}

// Fourth-order central differences.
inline double d1(const std::function<double(double)>& f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}
inline double d2(const std::function<double(double)>& f, double x, double h) {
  return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h);
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct Dispersion {
  double theta, D, D_plus, D_second;
};

// Frequency-domain finite differences at the pump and the degenerate frequency.
inline Dispersion bbo_type2(double pump_nm) {
  const double lp = pump_nm * 1e-3, ls = 2 * lp;
  const double th = bisect([&](double t) { return 2 * n_e_theta(lp, t) - bbo_o.n(ls) - n_e_theta(ls, t); },
                           0.0, pi / 2);
  const double wp = 2 * pi * c_um_fs / lp, ws = wp / 2, h = 1e-4 * ws;
  auto Ko = [&](double w) { return K([](double l) { return bbo_o.n(l); }, w); };
  auto Ke = [&](double w) { return K([&](double l) { return n_e_theta(l, th); }, w); };
  const double uo = d1(Ko, ws, h), ue = d1(Ke, ws, h), up = d1(Ke, wp, h);
  return {th, uo - ue, 0.5 * (uo + ue) - up, 0.0};
}

inline Dispersion bbo_type1(double pump_nm) {
  const double lp = pump_nm * 1e-3, ls = 2 * lp;
  const double th = bisect([&](double t) { return n_e_theta(lp, t) - bbo_o.n(ls); }, 0.0, pi / 2);
  const double wp = 2 * pi * c_um_fs / lp, ws = wp / 2, h = 1e-4 * ws;
  auto Ko = [&](double w) { return K([](double l) { return bbo_o.n(l); }, w); };
  auto Ke = [&](double w) { return K([&](double l) { return n_e_theta(l, th); }, w); };
  return {th, 0.0, d1(Ko, ws, h) - d1(Ke, wp, h), d2(Ko, ws, 1e-3 * ws)};
}

// --- incomplete gamma ------------------------------------------------------

// Lower incomplete gamma by its power series, any complex x.
inline cd lower_gamma_series(double a, cd x) {
  cd term = 1.0 / a, sum = term;
  for (int n = 1; n < 2000; ++n) {
    term *= -x / static_cast<double>(n);
    const cd t = term * (a / (a + n));
    sum += t;
    if (std::abs(t) < 1e-18 * std::abs(sum)) break;
  }
  // x^a sum_n (-x)^n / (n! (a + n))
  return std::pow(x, a) * sum;
}

// Upper incomplete gamma by the Legendre continued fraction (modified Lentz).
inline cd upper_gamma_cf(double a, cd x) {
  const double tiny = 1e-300;
  cd b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const cd del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x) * std::pow(x, a) * h;
}

inline cd upper_gamma(double a, cd x) {
  if (std::abs(x) < 6.0) return std::tgamma(a) - lower_gamma_series(a, x);
  return upper_gamma_cf(a, x);
}

// int_0^L z^-1/2 exp(i alpha / z) dz = (-i alpha)^(1/2) Gamma(-1/2, -i alpha / L)
inline cd chirp_uniform(double alpha, double L) {
  if (alpha == 0.0) return 2.0 * std::sqrt(L);
  const cd m(0.0, -alpha);
  return std::sqrt(m) * upper_gamma(-0.5, m / L);
}

// --- type-I amplitude ------------------------------------------------------

// Fixed-step Simpson in u = sqrt(z/L) on f(z) - f(0); the f(0) part is
// chirp_uniform. n even.
inline cd pi_type1(double tp, double tm, double sigma, double dplus, double d2, double L, long n = 1000000) {
  const double s2 = 0.25 * sigma * sigma;
  auto f = [&](double z) { const double x = tp + dplus * z; return std::exp(-s2 * x * x); };
  const double alpha = tm * tm / (4.0 * d2);
  const double f0 = f(0.0);
  auto g = [&](double u) -> cd {
    if (u == 0.0) return 0.0;
    const double z = L * u * u;
    return 2.0 * std::sqrt(L) * (f(z) - f0) * std::polar(1.0, alpha / z);
  };
  const double h = 1.0 / static_cast<double>(n);
  cd s = g(0.0) + g(1.0);
  for (long i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(i * h);
  return s * (h / 3.0) + f0 * chirp_uniform(alpha, L);
}

// --- g(T) --------------------------------------------------------------------

// Midpoint N x N on the upper half in (u1, s), u2 = u1 - u1 s^2, plus the
// lower half as the upper half at -T.
inline double g_midpoint(double T, double sigma, double dplusL, int N = 4096) {
  auto half = [&](double t) {
    const double h = 1.0 / N;
    double sum = 0.0;
    for (int i = 0; i < N; ++i) {
      const double u1 = (i + 0.5) * h;
      double row = 0.0;
      for (int j = 0; j < N; ++j) {
        const double s = (j + 0.5) * h;
        const double w2 = u1 * s * s;
        const double d = w2 * (2 * u1 - w2);  // u1^2 - u2^2
        const double x = dplusL * d - t;
        // 2 u1 (u1 - w^2) / sqrt(2 u1 - w^2) * dw/ds
        row += 2 * u1 * (u1 - w2) / std::sqrt(2 * u1 - w2) * std::sqrt(u1) *
               std::exp(-sigma * sigma * x * x / 8.0);
      }
      sum += row;
    }
    return sum * h * h;
  };
  return half(T) + half(-T);
}

// One-dimensional form: g(T) = h(T) + h(-T), h(T) = int_0^1 (1 - y^2)/2 e^{...} dy.
inline double g_simpson_1d(double T, double sigma, double dplusL, long n = 200000) {
  auto f = [&](double y, double t) {
    const double x = dplusL * y * y - t;
    return 0.5 * (1 - y * y) * std::exp(-sigma * sigma * x * x / 8.0);
  };
  const double h = 1.0 / static_cast<double>(n);
  double s = f(0, T) + f(1, T) + f(0, -T) + f(1, -T);
  for (long i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * (f(i * h, T) + f(i * h, -T));
  return s * h / 3.0;
}

// --- type-II amplitude -------------------------------------------------------

// Support t- in [min(0,-DL), max(0,-DL)], peak one, edges at half value.
inline double pi_type2(double tp, double tm, double sigma, double D, double dplus, double L) {
  const double a = std::min(0.0, -D * L), b = std::max(0.0, -D * L);
  if (tm < a || tm > b) return 0.0;
  const double x = tp - (dplus / D) * tm;
  const double v = std::exp(-sigma * sigma * x * x / 4.0);
  return (tm == a || tm == b) ? 0.5 * v : v;
}

struct Term {
  cd weight;
  double plus, minus;
  bool mirror;
  double proj;
};

// Brute-force |sum_i c_i Pi_i|^2 on a midpoint grid over all t+ and t-,
// divided by the 45/45 incoherent sum (1/4) sum_i |w_i|^2 |Pi_i|^2.
inline double rate_bruteforce(const std::vector<Term>& terms, double sigma, double D, double dplus, double L,
                              double hp, double hm) {
  double lo_m = 1e300, hi_m = -1e300, lo_p = 1e300, hi_p = -1e300;
  const double DL = std::abs(D) * L;
  for (const auto& t : terms) {
    // t- + minus in [-DL, DL] (either orientation, either mirror)
    lo_m = std::min(lo_m, -DL - t.minus);
    hi_m = std::max(hi_m, DL - t.minus);
    lo_p = std::min(lo_p, -std::abs(dplus) * L - 12 / sigma - t.plus);
    hi_p = std::max(hi_p, std::abs(dplus) * L + 12 / sigma - t.plus);
  }
  const long np = static_cast<long>((hi_p - lo_p) / hp) + 1;
  const long nm = static_cast<long>((hi_m - lo_m) / hm) + 1;
  double coh = 0.0, inc = 0.0;
  for (long i = 0; i < np; ++i) {
    const double tp = lo_p + (i + 0.5) * hp;
    for (long j = 0; j < nm; ++j) {
      const double tm = lo_m + (j + 0.5) * hm;
      cd s = 0.0;
      double q = 0.0;
      for (const auto& t : terms) {
        const double y = t.mirror ? -(tm + t.minus) : tm + t.minus;
        const double v = pi_type2(tp + t.plus, y, sigma, D, dplus, L);
        s += t.weight * t.proj * v;
        q += 0.25 * std::norm(t.weight) * v * v;
      }
      coh += std::norm(s);
      inc += q;
    }
  }
  return coh / inc;
}

}  // namespace oracle

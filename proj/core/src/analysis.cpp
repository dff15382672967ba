#include "biphoton/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>

#include <Eigen/Dense>
#include <fftw3.h>

#include "biphoton/units.hpp"

namespace biphoton {

void ScanResult::validate() const {
  const std::size_t n = delay_axis.size();
  if (rates.size() != n) throw ValidationError("scan: delay axis and rates differ in length");
  if (!envelope.empty() && envelope.size() != n) throw ValidationError("scan: envelope length mismatch");
  if (!fringe_phase.empty() && fringe_phase.size() != n)
    throw ValidationError("scan: fringe_phase length mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(delay_axis[i])) throw ValidationError("scan: non-finite delay at row " + std::to_string(i));
    if (!std::isfinite(rates[i]) || rates[i] < 0.0)
      throw ValidationError("scan: rate must be finite and >= 0 at row " + std::to_string(i));
  }
}

std::optional<double> ScanResult::omega() const {
  if (meta.is_object()) {
    auto it = meta.find("omega_p_radfs");
    if (it != meta.end() && it->is_number()) return it->get<double>();
  }
  return std::nullopt;
}

double ScanResult::uniform_step() const {
  const std::size_t n = delay_axis.size();
  if (n < 2) throw ValidationError("scan: need at least 2 samples");
  const double step = (delay_axis.back() - delay_axis.front()) / static_cast<double>(n - 1);
  if (!(step > 0.0)) throw ValidationError("scan: delay axis must increase");
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(delay_axis[i] - delay_axis[i - 1] - step) > 1e-6 * step)
      throw ValidationError("scan: delay axis is not uniform");
  }
  return step;
}

namespace {

struct LocalFit {
  double mean, amplitude;
};

// y ~ a + b cos(w t) + c sin(w t)
LocalFit fit_one_period(const double* t, const double* y, std::size_t n, double omega, double t_ref) {
  Eigen::MatrixXd A(static_cast<Eigen::Index>(n), 3);
  Eigen::VectorXd b(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double ph = omega * (t[i] - t_ref);
    const auto r = static_cast<Eigen::Index>(i);
    A(r, 0) = 1.0;
    A(r, 1) = std::cos(ph);
    A(r, 2) = std::sin(ph);
    b(r) = y[i];
  }
  const Eigen::Vector3d x = A.colPivHouseholderQr().solve(b);
  return {x(0), std::hypot(x(1), x(2))};
}

double resolve_omega(const ScanResult& scan, std::optional<double> omega) {
  if (omega) {
    if (!(*omega > 0.0)) throw ValidationError("fringe frequency must be > 0");
    return *omega;
  }
  if (auto w = scan.omega()) return *w;
  return dominant_angular_frequency(scan.delay_axis, scan.rates);
}

std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::vector<FringeWindow> fringe_windows(const ScanResult& scan, double omega) {
  const double period = 2.0 * kPi / omega;
  const auto& t = scan.delay_axis;
  std::vector<FringeWindow> out;
  std::size_t i = 0;
  const double t0 = t.front();
  const double slack = 1e-9 * period;
  for (int k = 0;; ++k) {
    const double lo = t0 + k * period - slack;
    const double hi = t0 + (k + 1) * period - slack;
    if (hi > t.back() + period * 1e-6) break;
    while (i < t.size() && t[i] < lo) ++i;
    std::size_t j = i;
    while (j < t.size() && t[j] < hi) ++j;
    if (j - i >= 4) {
      const double mid = 0.5 * (lo + hi);
      const LocalFit f = fit_one_period(t.data() + i, scan.rates.data() + i, j - i, omega, mid);
      out.push_back({mid, f.mean, f.amplitude});
    }
    i = j;
  }
  return out;
}

double dominant_angular_frequency(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 8) throw ValidationError("periodogram needs at least 8 samples");
  ScanResult tmp;
  tmp.delay_axis = t;
  tmp.rates.assign(y.size(), 0.0);
  const double dt = tmp.uniform_step();
  const std::size_t n = y.size();
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);

  std::size_t N = 1;
  while (N < 4 * n) N <<= 1;
  double* in = fftw_alloc_real(N);
  fftw_complex* spec = fftw_alloc_complex(N / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(N), in, spec, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < N; ++i) in[i] = i < n ? y[i] - mean : 0.0;
  fftw_execute(plan);
  std::size_t best = 1;
  double best_p = -1.0;
  for (std::size_t k = 1; k <= N / 2; ++k) {
    const double p = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
    if (p > best_p) {
      best_p = p;
      best = k;
    }
  }
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(spec);
  if (!(best_p > 0.0)) throw ValidationError("no fringes: signal is constant");

  const double dw = 2.0 * kPi / (static_cast<double>(N) * dt);
  auto power = [&](double w) {
    std::complex<double> s{};
    for (std::size_t i = 0; i < n; ++i) s += (y[i] - mean) * std::polar(1.0, -w * (t[i] - t[0]));
    return std::norm(s);
  };
  double a = (static_cast<double>(best) - 1.0) * dw;
  double b = (static_cast<double>(best) + 1.0) * dw;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = power(c), fd = power(d);
  for (int it = 0; it < 200 && (b - a) > 1e-12 * b; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = power(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = power(d);
    }
  }
  return 0.5 * (a + b);
}

EnvelopeFit fit_envelope(const ScanResult& scan, const FitOptions& opt) {
  scan.validate();
  if (scan.size() < 16) throw ValidationError("fit_envelope: scan too short");
  const double omega = resolve_omega(scan, opt.omega);
  const double period = 2.0 * kPi / omega;
  const auto& t = scan.delay_axis;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i] - t[i - 1] > period / 8.0 * (1.0 + 1e-6))
      throw ValidationError("fit_envelope: fewer than 8 points per fringe period");
  }
  if (t.back() - t.front() < 5.0 * period * (1.0 - 1e-9))
    throw ValidationError("fit_envelope: fewer than 5 fringe periods");

  const auto win = fringe_windows(scan, omega);
  const std::size_t K = win.size();
  if (K < 5) throw ValidationError("fit_envelope: fewer than 5 usable fringe periods");

  double level = 0.0, rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
  for (const auto& w : win) {
    level += w.mean;
    rmax = std::max(rmax, w.amplitude);
    rmin = std::min(rmin, w.amplitude);
  }
  level /= static_cast<double>(K);
  EnvelopeFit fit;
  fit.n_extrema = static_cast<int>(2 * K);
  if (!(level > 0.0) || rmax <= 1e-9 * level) throw FitError("no fringes", fit);

  std::vector<double> tc(K), ymax(K), ymin(K);
  for (std::size_t k = 0; k < K; ++k) {
    tc[k] = win[k].center;
    ymax[k] = win[k].max() / level;
    ymin[k] = win[k].min() / level;
  }

  // Moment seed on the fringe amplitude above its floor.
  double sw = 0.0, st = 0.0, st2 = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double w = win[k].amplitude - rmin;
    sw += w;
    st += w * tc[k];
  }
  double T0 = sw > 0.0 ? st / sw : 0.5 * (tc.front() + tc.back());
  for (std::size_t k = 0; k < K; ++k) {
    const double w = win[k].amplitude - rmin;
    st2 += w * (tc[k] - T0) * (tc[k] - T0);
  }
  double s0 = sw > 0.0 ? std::sqrt(st2 / sw) : 0.25 * (tc.back() - tc.front());
  if (!(s0 > period)) s0 = period;
  double base = 0.0;
  for (std::size_t k = 0; k < K; ++k) base += 0.5 * (ymax[k] + ymin[k]);
  base /= static_cast<double>(K);

  Eigen::Matrix<double, 6, 1> p;
  p << *std::max_element(ymax.begin(), ymax.end()) - base, base,
      *std::min_element(ymin.begin(), ymin.end()) - base, base, T0, std::log(s0);

  const auto M = static_cast<Eigen::Index>(2 * K);
  auto residuals = [&](const Eigen::Matrix<double, 6, 1>& q, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
    const double s = std::exp(q(5));
    for (std::size_t k = 0; k < K; ++k) {
      const double x = tc[k] - q(4);
      const double g = std::exp(-x * x / (2.0 * s * s));
      const auto i0 = static_cast<Eigen::Index>(2 * k);
      r(i0) = q(1) + q(0) * g - ymax[k];
      r(i0 + 1) = q(3) + q(2) * g - ymin[k];
      if (J) {
        const double dT = g * x / (s * s);
        const double dl = g * x * x / (s * s);
        J->row(i0) << g, 1.0, 0.0, 0.0, q(0) * dT, q(0) * dl;
        J->row(i0 + 1) << 0.0, 0.0, g, 1.0, q(2) * dT, q(2) * dl;
      }
    }
    return 0.5 * r.squaredNorm();
  };

  auto pack = [&](const Eigen::Matrix<double, 6, 1>& q, double cost, int iters) {
    EnvelopeFit f;
    f.a_max = q(0) * level;
    f.b_max = q(1) * level;
    f.a_min = q(2) * level;
    f.b_min = q(3) * level;
    f.center = q(4);
    f.sigma = std::exp(q(5));
    f.fwhm = 2.0 * std::sqrt(2.0 * kLn2) * f.sigma;
    const double hi = q(0) + q(1), lo = q(2) + q(3);
    f.visibility = hi + lo > 0.0 ? std::clamp((hi - lo) / (hi + lo), 0.0, 1.0) : 0.0;
    f.residual_rms = std::sqrt(2.0 * cost / static_cast<double>(M));
    f.n_extrema = static_cast<int>(M);
    f.iterations = iters;
    return f;
  };

  Eigen::VectorXd r(M), rt(M);
  Eigen::MatrixXd J(M, 6);
  double cost = residuals(p, r, &J);
  double lambda = 1e-3;
  bool converged = false;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    const Eigen::Matrix<double, 6, 6> H = J.transpose() * J;
    const Eigen::Matrix<double, 6, 1> grad = J.transpose() * r;
    if (grad.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, cost)) {
      converged = true;
      break;
    }
    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::Matrix<double, 6, 6> A = H;
      for (int d = 0; d < 6; ++d) A(d, d) += lambda * std::max(H(d, d), 1e-12);
      const Eigen::Matrix<double, 6, 1> step = A.ldlt().solve(-grad);
      const Eigen::Matrix<double, 6, 1> trial = p + step;
      const double c = residuals(trial, rt, nullptr);
      if (std::isfinite(c) && c <= cost) {
        const double drop = cost - c;
        p = trial;
        lambda = std::max(lambda / 3.0, 1e-12);
        cost = residuals(p, r, &J);
        accepted = true;
        if (drop <= 1e-14 * cost + 1e-30 || step.norm() <= 1e-12 * (p.norm() + 1e-12)) converged = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted) {
      converged = true;  // no descent direction left: stationary to round-off
      break;
    }
    if (converged) break;
  }
  fit = pack(p, cost, it);
  if (!converged) throw FitError("fit_envelope did not converge", fit);
  if (!std::isfinite(fit.fwhm) || fit.fwhm > 10.0 * (t.back() - t.front()))
    throw FitError("fit_envelope: envelope wider than the scan", fit);
  if (fit.a_max - fit.a_min <= 0.0) throw FitError("no fringes", fit);
  return fit;
}

double visibility_at(const ScanResult& scan, double T_center, std::optional<double> omega) {
  scan.validate();
  const double w = resolve_omega(scan, omega);
  const double half = kPi / w;
  const auto& t = scan.delay_axis;
  const double tol = 1e-9 * half;
  if (t.empty() || t.front() > T_center - half + tol || t.back() < T_center + half - tol)
    throw ValidationError("visibility_at: less than one fringe period around the requested delay");
  const auto lo = std::lower_bound(t.begin(), t.end(), T_center - half - tol);
  const auto hi = std::upper_bound(t.begin(), t.end(), T_center + half + tol);
  const auto n = static_cast<std::size_t>(hi - lo);
  if (n < 4) throw ValidationError("visibility_at: fewer than 4 samples in the fringe period");
  const auto off = static_cast<std::size_t>(lo - t.begin());
  const LocalFit f = fit_one_period(t.data() + off, scan.rates.data() + off, n, w, T_center);
  if (!(f.mean > 0.0)) throw ValidationError("visibility_at: mean rate is not positive");
  return std::clamp(f.amplitude / f.mean, 0.0, 1.0);
}

double half_max_width(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw ValidationError("half_max_width: bad profile");
  const double peak = *std::max_element(y.begin(), y.end());
  if (!(peak > 0.0)) throw ValidationError("half_max_width: profile has no positive peak");
  const double h = 0.5 * peak;
  const std::size_t n = y.size();
  if (y.front() >= h || y.back() >= h) throw ValidationError("half_max_width: profile does not fall to half maximum");
  std::size_t i = 1;
  while (y[i] < h) ++i;
  const double left = x[i - 1] + (h - y[i - 1]) * (x[i] - x[i - 1]) / (y[i] - y[i - 1]);
  std::size_t j = n - 2;
  while (y[j] < h) --j;
  const double right = x[j] + (h - y[j]) * (x[j + 1] - x[j]) / (y[j + 1] - y[j]);
  return right - left;
}

nlohmann::json to_json(const EnvelopeFit& fit) {
  return {{"fwhm_fs", fit.fwhm},
          {"center_fs", fit.center},
          {"visibility", fit.visibility},
          {"residual_rms", fit.residual_rms},
          {"n_extrema", fit.n_extrema}};
}

}  // namespace biphoton

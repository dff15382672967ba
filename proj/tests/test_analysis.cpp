#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "biphoton/analysis.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/interference.hpp"
#include "biphoton/io.hpp"
#include "biphoton/units.hpp"

using namespace biphoton;

namespace {

const double kOmega = omega_from_wavelength_nm(400.0);
const double kPeriod = 2.0 * kPi / kOmega;

// level * (1 + v exp(-(T-c)^2 / 2 s^2) cos(omega T)), 8+ points per period.
ScanResult synthetic(double s, double v, double c = 0.0, double level = 1.0, double span_sigmas = 5.0,
                     double step = kPeriod / 10.0) {
  ScanResult r;
  const double half = span_sigmas * s;
  r.delay_axis = linear_axis(c - half, c + half, step);
  for (double T : r.delay_axis) {
    const double e = std::exp(-(T - c) * (T - c) / (2.0 * s * s));
    r.rates.push_back(level * (1.0 + v * e * std::cos(kOmega * T)));
  }
  r.envelope.assign(r.size(), 0.0);
  r.fringe_phase.assign(r.size(), 0.0);
  r.meta["omega_p_radfs"] = kOmega;
  return r;
}

const double kFwhmPerSigma = 2.0 * std::sqrt(2.0 * std::log(2.0));

}  // namespace

TEST(FitEnvelope, RecoversPumpEnvelope) {
  const ScanResult r = synthetic(72.2, 1.0);
  const EnvelopeFit f = fit_envelope(r);
  EXPECT_NEAR(f.fwhm, 170.0, 0.5);
  EXPECT_NEAR(f.visibility, 1.0, 0.005);
  EXPECT_NEAR(f.center, 0.0, 0.5);
  EXPECT_GT(f.n_extrema, 5);
  EXPECT_LT(f.residual_rms, 0.05);
}

TEST(FitEnvelope, ConstantScanHasNoFringes) {
  ScanResult r = synthetic(72.2, 0.0);
  try {
    fit_envelope(r);
    FAIL() << "expected FitError";
  } catch (const FitError& e) {
    EXPECT_NE(std::string(e.what()).find("no fringes"), std::string::npos);
    EXPECT_EQ(e.best().visibility, 0.0);
  }
  EXPECT_NEAR(visibility_at(r, 0.0), 0.0, 1e-12);
}

TEST(FitEnvelope, ScaleEquivariant) {
  ScanResult r = synthetic(120.0, 0.6, 30.0);
  const EnvelopeFit base = fit_envelope(r);
  for (double k : {0.01, 3.0, 1e4}) {
    ScanResult s = r;
    for (double& x : s.rates) x *= k;
    const EnvelopeFit f = fit_envelope(s);
    EXPECT_NEAR(f.fwhm, base.fwhm, 1e-6 * base.fwhm) << k;
    EXPECT_NEAR(f.visibility, base.visibility, 1e-9) << k;
  }
}

TEST(FitEnvelope, RoundTripRandomParameters) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> S(50.0, 500.0), V(0.3, 1.0), C(-100.0, 100.0);
  for (int i = 0; i < 25; ++i) {
    const double s = S(rng), v = V(rng), c = C(rng);
    const EnvelopeFit f = fit_envelope(synthetic(s, v, c, 1.0, 4.0, kPeriod / 8.0));
    EXPECT_NEAR(f.fwhm, kFwhmPerSigma * s, 0.01 * kFwhmPerSigma * s) << s << " " << v;
    EXPECT_NEAR(f.visibility, v, 0.01) << s << " " << v;
    EXPECT_NEAR(f.center, c, 0.01 * s) << s << " " << v;
  }
}

TEST(FitEnvelope, UsesExplicitOmega) {
  ScanResult r = synthetic(100.0, 0.8);
  r.meta = nlohmann::json::object();
  const EnvelopeFit a = fit_envelope(r, FitOptions{kOmega});
  const EnvelopeFit b = fit_envelope(r);  // periodogram
  EXPECT_NEAR(a.fwhm, kFwhmPerSigma * 100.0, 1.0);
  EXPECT_NEAR(b.fwhm, a.fwhm, 1e-3 * a.fwhm);
}

TEST(FitEnvelope, UnderSampledRejected) {
  const ScanResult r = synthetic(72.2, 1.0, 0.0, 1.0, 5.0, kPeriod / 6.0);
  EXPECT_THROW(fit_envelope(r), ValidationError);
}

TEST(FitEnvelope, TooFewPeriodsRejected) {
  ScanResult r;
  r.delay_axis = linear_axis(0.0, 3.0 * kPeriod, kPeriod / 16.0);
  for (double T : r.delay_axis) r.rates.push_back(1.0 + std::cos(kOmega * T));
  r.envelope.assign(r.size(), 0.0);
  r.fringe_phase.assign(r.size(), 0.0);
  EXPECT_THROW(fit_envelope(r, FitOptions{kOmega}), ValidationError);
}

TEST(FitEnvelope, NonUniformAxisRejected) {
  ScanResult r = synthetic(72.2, 1.0);
  r.delay_axis[10] += 0.3 * (r.delay_axis[11] - r.delay_axis[10]);
  EXPECT_THROW(fit_envelope(r), ValidationError);
}

TEST(FitEnvelope, MismatchedLengthsRejected) {
  ScanResult r = synthetic(72.2, 1.0);
  r.rates.pop_back();
  EXPECT_THROW(fit_envelope(r), ValidationError);
}

TEST(VisibilityAt, PerfectFringe) {
  EXPECT_NEAR(visibility_at(synthetic(1e9, 1.0, 0.0, 1.0, 1e-6), 0.0), 1.0, 1e-9);
}

TEST(VisibilityAt, PartialFringe) {
  EXPECT_NEAR(visibility_at(synthetic(1e9, 0.76, 0.0, 1.0, 1e-6), 0.0), 0.76, 0.005);
}

TEST(VisibilityAt, OffsetFringe) {
  // 2 + cos = 2 (1 + 0.5 cos)
  EXPECT_NEAR(visibility_at(synthetic(1e9, 0.5, 0.0, 2.0, 1e-6), 0.0), 0.5, 1e-9);
}

TEST(VisibilityAt, NeedsAFullPeriod) {
  const ScanResult r = synthetic(1e9, 1.0, 0.0, 1.0, 1e-6);
  EXPECT_THROW(visibility_at(r, r.delay_axis.back()), ValidationError);
}

TEST(Windows, TrackEnvelope) {
  const ScanResult r = synthetic(150.0, 0.9);
  const auto w = fringe_windows(r, kOmega);
  ASSERT_GT(w.size(), 20u);
  for (const auto& x : w) {
    const double e = 0.9 * std::exp(-x.center * x.center / (2.0 * 150.0 * 150.0));
    EXPECT_NEAR(x.amplitude, e, 2e-3) << x.center;
    EXPECT_NEAR(x.mean, 1.0, 2e-3);
  }
}

TEST(Periodogram, FindsTone) {
  std::vector<double> t, y;
  for (int i = 0; i < 3000; ++i) {
    t.push_back(0.1 * i);
    y.push_back(3.0 + std::sin(1.7 * t.back() + 0.4));
  }
  EXPECT_NEAR(dominant_angular_frequency(t, y), 1.7, 1e-4);
}

TEST(HalfMaxWidth, Gaussian) {
  std::vector<double> x, y;
  for (int i = -400; i <= 400; ++i) {
    x.push_back(i * 0.5);
    y.push_back(std::exp(-x.back() * x.back() / (2.0 * 30.0 * 30.0)));
  }
  EXPECT_NEAR(half_max_width(x, y), kFwhmPerSigma * 30.0, 1e-2);
  std::vector<double> flat(x.size(), 1.0);
  EXPECT_THROW(half_max_width(x, flat), ValidationError);
}

TEST(ScanCsv, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "biphoton_test_analysis";
  std::filesystem::create_directories(dir);
  ScanResult r = synthetic(80.0, 0.7);
  r.axis_name = "delay_fs";
  write_scan_csv(dir / "scan.csv", r);
  const ScanResult back = read_scan_csv(dir / "scan.csv");
  ASSERT_EQ(back.size(), r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_NEAR(back.delay_axis[i], r.delay_axis[i], 1e-10 * std::max(1.0, std::abs(r.delay_axis[i])));
    EXPECT_NEAR(back.rates[i], r.rates[i], 1e-11);
  }
  const EnvelopeFit f = fit_envelope(back, FitOptions{kOmega});
  EXPECT_NEAR(f.fwhm, kFwhmPerSigma * 80.0, 0.5);
  std::filesystem::remove_all(dir);
}

TEST(ScanCsv, HeaderlessTwoColumns) {
  const auto path = std::filesystem::temp_directory_path() / "biphoton_test_plain.csv";
  {
    std::ofstream out(path);
    out << "# measured\n0,1.5\n0.1,1.25\n0.2,1\n";
  }
  const ScanResult r = read_scan_csv(path);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_DOUBLE_EQ(r.rates[1], 1.25);
  std::filesystem::remove(path);
}

TEST(Format, TwelveSignificantDigits) {
  EXPECT_EQ(format_number(0.1 + 0.2), "0.3");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
}

TEST(FitJson, Keys) {
  const nlohmann::json j = to_json(fit_envelope(synthetic(72.2, 1.0)));
  for (const char* key : {"fwhm_fs", "center_fs", "visibility", "residual_rms", "n_extrema"})
    EXPECT_TRUE(j.contains(key)) << key;
}

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "biphoton/analysis.hpp"
#include "biphoton/biphoton.hpp"
#include "biphoton/dispersion.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/interference.hpp"
#include "support/oracles.hpp"

using namespace biphoton;

namespace {

struct TypeIISetup {
  PumpPulse pump = PresetCatalog::builtin().pump("pump-170fs").pulse();
  CrystalParams crystal = PresetCatalog::builtin().crystal_params("bbo-typeII-3.4mm", pump);
  double DL() const { return std::abs(crystal.D) * crystal.length_um; }
  std::shared_ptr<const BiphotonKernel> kernel() const { return std::make_shared<TypeIIKernel>(pump, crystal); }
};

struct TypeISetup {
  PumpPulse pump = PresetCatalog::builtin().pump("pump-200fs").pulse();
  CrystalParams crystal = PresetCatalog::builtin().crystal_params("bbo-typeI-3.4mm", pump);
  std::shared_ptr<const BiphotonKernel> kernel() const { return std::make_shared<TypeIKernel>(pump, crystal); }
};

double period(const PumpPulse& p) { return 2.0 * kPi / p.omega_p; }

double max_hom_visibility(const PumpPulse& pump, const CrystalParams& c, const FilterPair& f = {}) {
  const double DL = std::abs(c.D) * c.length_um;
  return hom_visibility(linear_axis(0.0, DL, DL / 40.0), pump, c, f).meta.at("max_visibility").get<double>();
}

}  // namespace

TEST(Analyzer, ProjectionConvention) {
  const AnalyzerPair a{0.3, 1.1};
  EXPECT_DOUBLE_EQ(a.projection({Polarization::H, Polarization::V}), std::cos(0.3) * std::sin(1.1));
  EXPECT_DOUBLE_EQ(a.projection({Polarization::V, Polarization::H}), std::sin(0.3) * std::cos(1.1));
  EXPECT_DOUBLE_EQ(a.projection({Polarization::H, Polarization::H}), std::cos(0.3) * std::cos(1.1));
  EXPECT_NEAR(AnalyzerPair::degrees(45, 90).theta2, 0.5 * kPi, 1e-15);
}

TEST(SchemeTest, TermCounts) {
  const TypeIISetup s2;
  const TypeISetup s1;
  EXPECT_EQ(Scheme::type2_mzi(s2.kernel()).terms({}).size(), 2u);
  EXPECT_EQ(Scheme::type1_mzi(s1.kernel()).terms({}).size(), 2u);
  EXPECT_EQ(Scheme::branning4(s2.kernel()).terms({}).size(), 4u);
  const auto hom = Scheme::type2_hom_single(s2.kernel()).terms({0.0, 10.0});
  ASSERT_EQ(hom.size(), 2u);
  EXPECT_EQ(std::count_if(hom.begin(), hom.end(), [](const AmplitudeTerm& t) { return t.mirror_minus; }), 1);
  for (auto kind : {SchemeKind::TypeII_MZI, SchemeKind::Branning4, SchemeKind::TypeII_HOM_single})
    for (const auto& t : Scheme::make(kind, s2.kernel()).terms({123.0, 45.0})) EXPECT_LE(std::abs(t.weight), 1.0 + 1e-15);
}

TEST(SchemeTest, KernelKindMismatchRejected) {
  const TypeIISetup s2;
  const TypeISetup s1;
  EXPECT_THROW(Scheme::type1_mzi(s2.kernel()), ValidationError);
  EXPECT_THROW(Scheme::type2_mzi(s1.kernel()), ValidationError);
  EXPECT_THROW(Scheme::branning4(s1.kernel()), ValidationError);
  EXPECT_THROW(Scheme::type2_mzi(nullptr), ValidationError);
}

TEST(SchemeTest, NamesRoundTrip) {
  for (auto k : {SchemeKind::TypeII_MZI, SchemeKind::TypeI_MZI, SchemeKind::TypeII_HOM_single, SchemeKind::Branning4})
    EXPECT_EQ(parse_scheme(to_string(k)), k);
  EXPECT_THROW(parse_scheme("michelson"), ValidationError);
}

TEST(Rate, TypeIIAt45DegreesAndZeroDelay) {
  const TypeIISetup s;
  EXPECT_NEAR(coincidence_rate(Scheme::type2_mzi(s.kernel()), {}, {}), 2.0, 1e-12);
}

TEST(Rate, TypeIAt45DegreesAndZeroDelay) {
  const TypeISetup s;
  EXPECT_NEAR(coincidence_rate(Scheme::type1_mzi(s.kernel()), {}, {}), 0.0, 1e-9);
}

TEST(Rate, CrossedAnalyzersAtZero) {
  const TypeIISetup s;
  EXPECT_NEAR(coincidence_rate(Scheme::type2_mzi(s.kernel()), {0.0, 0.0}, {}), 0.0, 1e-15);
}

TEST(Rate, MatchesOneplusVCos) {
  const TypeIISetup s;
  const Scheme sc = Scheme::type2_mzi(s.kernel());
  for (double T : {-210.3, -33.0, 0.7, 88.8, 170.0}) {
    const double expected = 1.0 + envelope_V(T, s.pump) * std::cos(s.pump.omega_p * T);
    EXPECT_NEAR(coincidence_rate(sc, {}, {T, 0.0}), expected, 1e-9) << T;
  }
}

TEST(Rate, FlatAtLargeDelay) {
  const TypeIISetup s;
  const Scheme sc = Scheme::type2_mzi(s.kernel());
  for (double T = 3000.0; T < 3001.4; T += 0.1) EXPECT_NEAR(coincidence_rate(sc, {}, {T, 0.0}), 1.0, 1e-12);
}

TEST(Rate, CommonWeightScalingInvariant) {
  const TypeIISetup s;
  const auto k = s.kernel();
  const Scheme sc = Scheme::branning4(k, 0.4);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> T(-300.0, 300.0), tau(0.0, s.DL()), ang(0.0, kPi);
  for (int i = 0; i < 20; ++i) {
    const Delays d{T(rng), tau(rng)};
    const AnalyzerPair a{ang(rng), ang(rng)};
    auto terms = sc.terms(d);
    const RateComponents base = rate_components(*k, terms, a);
    for (auto& t : terms) t.weight *= cplx(0.3, -0.2);
    const RateComponents scaled = rate_components(*k, terms, a);
    EXPECT_NEAR(scaled.rate(), base.rate(), 1e-12);
    EXPECT_NEAR(scaled.visibility(), base.visibility(), 1e-12);
  }
}

TEST(Rate, EmptyTermListRejected) {
  const TypeIISetup s;
  EXPECT_THROW(rate_components(*s.kernel(), {}, {}), ValidationError);
}

TEST(Rate, TwoTermSchemesStayInBounds) {
  const TypeIISetup s2;
  const TypeISetup s1;
  const std::vector<Scheme> schemes{Scheme::type2_mzi(s2.kernel()), Scheme::type2_hom_single(s2.kernel()),
                                    Scheme::type1_mzi(s1.kernel())};
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> T(-600.0, 600.0), tau(-s2.DL(), s2.DL());
  for (const auto& sc : schemes)
    for (int i = 0; i < 25; ++i) {
      const Delays d{T(rng), sc.kind() == SchemeKind::TypeII_HOM_single ? tau(rng) : 0.0};
      const double r = coincidence_rate(sc, {}, d);
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, 2.0 + 1e-9);
    }
}

TEST(Rate, HalfPeriodNegatesCosineTerm) {
  const TypeIISetup s;
  const Scheme sc = Scheme::type2_mzi(s.kernel());
  const double half = 0.5 * period(s.pump);
  for (double T : {-100.0, 12.5, 77.0}) {
    const RateComponents a = rate_components(sc, {}, {T, 0.0});
    const RateComponents b = rate_components(sc, {}, {T + half, 0.0});
    const double ratio = envelope_V(T + half, s.pump) / envelope_V(T, s.pump);
    EXPECT_NEAR(b.cross.real(), -ratio * a.cross.real(), 1e-12);
    EXPECT_NEAR(b.cross.imag(), -ratio * a.cross.imag(), 1e-12);
  }
}

TEST(EnvelopeV, ClosedForm) {
  const TypeIISetup s;
  EXPECT_EQ(envelope_V(0.0, s.pump), 1.0);
  EXPECT_NEAR(envelope_V(std::sqrt(8.0 * std::log(2.0)) / s.pump.sigma_p, s.pump), 0.5, 1e-15);
  EXPECT_NEAR(2.0 * std::sqrt(8.0 * std::log(2.0)) / s.pump.sigma_p, 170.0, 1e-9);
}

TEST(EnvelopeG, UnitAtZeroAndBounded) {
  const TypeISetup s;
  EXPECT_EQ(envelope_G(0.0, s.pump, s.crystal), 1.0);
  for (double T : {-700.0, -150.0, 60.0, 400.0}) {
    const double g = envelope_G(T, s.pump, s.crystal);
    EXPECT_GT(g, 0.0);
    EXPECT_LT(g, 1.0);
  }
}

TEST(EnvelopeG, EqualsRealPartOfShiftedOverlap) {
  const TypeISetup s;
  const TypeIKernel k(s.pump, s.crystal);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> T(-600.0, 600.0);
  for (int i = 0; i < 10; ++i) {
    const double t = T(rng);
    EXPECT_NEAR(k.t_plus_overlap(t).real(), envelope_G(t, s.pump, s.crystal), 1e-7) << t;
  }
}

TEST(EnvelopeG, MatchesShiftedGridOverlap) {
  const TypeISetup s;
  const TypeIKernel k(s.pump, s.crystal);
  const GridSpec base = auto_grid_spec(k);
  // Wide t- window: |Pi|^2 falls only like t-^-4.
  const double h = base.t_minus.step;
  const int half = static_cast<int>(std::ceil(400.0 / h));
  for (double T : {-250.0, 140.0}) {
    const int extra = static_cast<int>(std::ceil(std::abs(T) / base.t_plus.step));
    const GridSpec spec{Axis{base.t_plus.start - extra * base.t_plus.step, base.t_plus.step,
                             base.t_plus.count + 2 * extra},
                        Axis{-(half + 0.5) * h, h, 2 * half + 2}};
    const cplx o = overlap(sample_grid(k, spec, {T, 0.0, false}), sample_grid(k, spec));
    EXPECT_NEAR(o.real(), envelope_G(T, s.pump, s.crystal), 1e-3) << T << " " << o;
  }
}

TEST(Polarization, TypeIIFollowsSinSquared) {
  const TypeIISetup s;
  const Scheme sc = Scheme::type2_mzi(s.kernel());
  const auto th = linear_axis(0.0, kPi, kPi / 36.0);
  for (double t2 : {0.0, 0.4, 1.3}) {
    const ScanResult r = polarization_scan(sc, th, t2);
    EXPECT_EQ(r.axis_name, "theta1_rad");
    for (std::size_t i = 0; i < th.size(); ++i) EXPECT_NEAR(r.rates[i], std::pow(std::sin(th[i] + t2), 2), 1e-12);
  }
  const ScanResult r = polarization_scan(sc, {0.25 * kPi}, 0.25 * kPi);
  EXPECT_NEAR(r.rates[0], 1.0, 1e-12);
}

TEST(Polarization, TypeIFollowsCosSquared) {
  const TypeISetup s;
  const Scheme sc = Scheme::type1_mzi(s.kernel());
  EXPECT_NEAR(polarization_scan(sc, {0.3 * kPi}, 0.2 * kPi).rates[0], 0.0, 1e-9);
  EXPECT_NEAR(polarization_scan(sc, {0.0}, 0.0).rates[0], 1.0, 1e-9);
  const auto th = linear_axis(0.0, kPi, kPi / 12.0);
  const ScanResult r = polarization_scan(sc, th, 0.7);
  for (std::size_t i = 0; i < th.size(); ++i) EXPECT_NEAR(r.rates[i], std::pow(std::cos(th[i] + 0.7), 2), 1e-9);
}

TEST(Polarization, WholePeriodDelayAccepted) {
  const TypeIISetup s;
  const Scheme sc = Scheme::type2_mzi(s.kernel());
  const double T = 3.0 * period(s.pump);
  const ScanResult r = polarization_scan(sc, {0.25 * kPi}, 0.25 * kPi, T);
  // sin^2 law scaled toward the incoherent level by V(T).
  EXPECT_NEAR(r.rates[0], 0.5 * (1.0 + envelope_V(T, s.pump)), 1e-12);
  EXPECT_THROW(polarization_scan(sc, {0.0}, 0.0, 0.3 * period(s.pump)), ValidationError);
}

TEST(Spacetime, UnderSampledAxisRejected) {
  const TypeIISetup s;
  const Scheme sc = Scheme::type2_mzi(s.kernel());
  EXPECT_THROW(spacetime_scan(sc, {}, linear_axis(0.0, 50.0, period(s.pump) / 7.0)), ValidationError);
  EXPECT_THROW(spacetime_scan(sc, {}, {1.0, 0.5}), ValidationError);
  EXPECT_NO_THROW(spacetime_scan(sc, {}, linear_axis(0.0, 50.0, period(s.pump) / 8.0)));
}

TEST(Spacetime, PeriodIsPumpWavelength) {
  const TypeIISetup s;
  const ScanResult r = spacetime_scan(Scheme::type2_mzi(s.kernel()), {}, linear_axis(-300.0, 300.0, 0.1));
  EXPECT_NEAR(r.meta.at("fringe_period_fs").get<double>() * kSpeedOfLight * 1e3, 400.0, 1e-9);
  EXPECT_NEAR(r.meta.at("omega_p_radfs").get<double>(), s.pump.omega_p, 0.0);
  const double w = dominant_angular_frequency(r.delay_axis, r.rates);
  EXPECT_NEAR(w, s.pump.omega_p, 5e-3 * s.pump.omega_p);
}

TEST(Spacetime, TypeIIEnvelopeIndependentOfLength) {
  const TypeIISetup s;
  const auto axis = linear_axis(-400.0, 400.0, 0.1);
  const ScanResult a = spacetime_scan(Scheme::type2_mzi(s.kernel()), {}, axis);
  const CrystalParams c2 = s.crystal.with_length(2.0 * s.crystal.length_um);
  const ScanResult b = spacetime_scan(Scheme::type2_mzi(std::make_shared<TypeIIKernel>(s.pump, c2)), {}, axis);
  double worst = 0.0;
  for (std::size_t i = 0; i < axis.size(); ++i) worst = std::max(worst, std::abs(a.envelope[i] - b.envelope[i]));
  EXPECT_LT(worst, 1e-3);
}

TEST(Spacetime, TypeIEnvelopeBroadensWithLength) {
  const TypeISetup s;
  const auto T = linear_axis(0.0, 1500.0, 10.0);
  auto width = [&](const CrystalParams& c) {
    std::vector<double> x, y;
    for (double t : T) {
      x.push_back(t);
      y.push_back(envelope_G(t, s.pump, c));
    }
    // Mirror to a symmetric profile.
    std::vector<double> xs, ys;
    for (std::size_t i = x.size(); i-- > 1;) xs.push_back(-x[i]), ys.push_back(y[i]);
    xs.insert(xs.end(), x.begin(), x.end());
    ys.insert(ys.end(), y.begin(), y.end());
    return half_max_width(xs, ys);
  };
  const double w1 = width(s.crystal);
  const double w2 = width(s.crystal.with_length(2.0 * s.crystal.length_um));
  EXPECT_GT(w1, 200.0);
  EXPECT_GT(w2, 1.02 * w1);
}

TEST(Spacetime, ZeroVisibilityIsFlat) {
  const TypeIISetup s;
  // Far beyond the envelope the cross term is zero and the scan sits at 1.
  const ScanResult r = spacetime_scan(Scheme::type2_mzi(s.kernel()), {}, linear_axis(5000.0, 5010.0, 0.1));
  for (double v : r.rates) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Hom, ZeroAtZeroDelay) {
  const TypeIISetup s;
  const ScanResult r = hom_visibility({0.0}, s.pump, s.crystal);
  EXPECT_NEAR(r.envelope[0], 0.0, 1e-12);
  EXPECT_EQ(r.axis_name, "tau_fs");
}

TEST(Hom, PulsedBelowOneAtHalfDL) {
  const TypeIISetup s;
  const ScanResult r = hom_visibility({0.5 * s.DL()}, s.pump, s.crystal);
  EXPECT_LT(r.envelope[0], 1.0);
  EXPECT_GT(r.envelope[0], 0.0);
}

TEST(Hom, PeakNearHalfDL) {
  const TypeIISetup s;
  const ScanResult r = hom_visibility(linear_axis(0.0, s.DL(), s.DL() / 40.0), s.pump, s.crystal);
  EXPECT_NEAR(r.meta.at("tau_at_max_fs").get<double>(), 0.5 * s.DL(), s.DL() / 40.0 + 1e-9);
}

TEST(Hom, QuasiCwApproachesFullVisibility) {
  const TypeIISetup s;
  const PumpPulse cw = s.pump.with_sigma(s.pump.sigma_p / 100.0);
  const ScanResult r = hom_visibility({0.5 * s.DL()}, cw, s.crystal);
  EXPECT_GT(r.envelope[0], 0.98);
}

TEST(Hom, ShorterCrystalRaisesVisibility) {
  const TypeIISetup s;
  double prev = max_hom_visibility(s.pump, s.crystal);
  for (double f : {0.5, 0.25}) {
    const double v = max_hom_visibility(s.pump, s.crystal.with_length(f * s.crystal.length_um));
    EXPECT_GE(v, prev) << f;
    prev = v;
  }
}

TEST(Hom, NarrowerFiltersRaiseVisibility) {
  const TypeIISetup s;
  double prev = max_hom_visibility(s.pump, s.crystal);
  for (double nm : {20.0, 10.0, 5.0}) {
    const FilterPair f{SpectralFilter::from_nm(800.0, nm), SpectralFilter::from_nm(800.0, nm)};
    const double v = max_hom_visibility(s.pump, s.crystal, f);
    EXPECT_GE(v, prev) << nm;
    prev = v;
  }
}

TEST(Hom, RequiresTypeII) {
  const TypeISetup s;
  EXPECT_THROW(hom_visibility({0.0}, s.pump, s.crystal), ValidationError);
}

TEST(Branning, FullVisibilityAtZeroDelays) {
  const TypeIISetup s;
  EXPECT_NEAR(branning_visibility(0.0, 0.0, s.pump, s.crystal), 1.0, 1e-3);
  for (double phase : {0.0, 0.9, 2.5}) {
    double lo = 1e9, hi = -1e9;
    for (double phi = 0.0; phi < 2.0 * kPi; phi += 0.01) {
      const double r = branning_rate(0.0, 0.0, {}, s.pump, s.crystal, phase + phi);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    EXPECT_NEAR((hi - lo) / (hi + lo), 1.0, 1e-3) << phase;
  }
}

TEST(Branning, LargeDelayLeavesSinglePassHom) {
  const TypeIISetup s;
  EXPECT_NEAR(branning_visibility(4000.0, 0.0, s.pump, s.crystal), 0.0, 1e-9);
}

TEST(Branning, MatchesBruteForce) {
  const TypeIISetup s;
  const auto k = s.kernel();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> T(-250.0, 250.0), tau(0.0, s.DL());
  for (int i = 0; i < 3; ++i) {
    const Delays d{T(rng), tau(rng)};
    const AnalyzerPair a{};
    std::vector<oracle::Term> ot;
    for (const auto& t : Scheme::branning4(k).terms(d))
      ot.push_back({t.weight, t.shift_plus, t.shift_minus, t.mirror_minus, a.projection(t.pol_pair)});
    const double ref = oracle::rate_bruteforce(ot, s.pump.sigma_p, s.crystal.D, s.crystal.D_plus,
                                               s.crystal.length_um, 2.0, 0.1);
    EXPECT_NEAR(branning_rate(d.T_p, d.tau, a, s.pump, s.crystal), ref, 1e-3) << d.T_p << " " << d.tau;
  }
}

TEST(Axis, LinearAxisIncludesEnd) {
  const auto a = linear_axis(0.0, 1.0, 0.1);
  ASSERT_EQ(a.size(), 11u);
  EXPECT_NEAR(a.back(), 1.0, 1e-15);
  EXPECT_THROW(linear_axis(1.0, 0.0, 0.1), ValidationError);
}

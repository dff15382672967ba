#include <benchmark/benchmark.h>

#include <memory>

#include "biphoton/analysis.hpp"
#include "biphoton/biphoton.hpp"
#include "biphoton/dispersion.hpp"
#include "biphoton/interference.hpp"

using namespace biphoton;

namespace {

const PresetCatalog& cat() { return PresetCatalog::builtin(); }

struct Type2 {
  PumpPulse pump = cat().pump("pump-170fs").pulse();
  CrystalParams crystal = cat().crystal_params("bbo-typeII-3.4mm", pump);
};

struct Type1 {
  PumpPulse pump = cat().pump("pump-200fs").pulse();
  CrystalParams crystal = cat().crystal_params("bbo-typeI-3.4mm", pump);
};

void BM_PiType1Point(benchmark::State& st) {
  const Type1 s;
  double tp = -300.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(pi_type1(tp, 12.5, s.pump, s.crystal));
    tp = tp > 300.0 ? -300.0 : tp + 7.0;
  }
}
BENCHMARK(BM_PiType1Point);

void BM_EnvelopeG(benchmark::State& st) {
  const Type1 s;
  const double T = static_cast<double>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(g_envelope_integral(T, s.pump, s.crystal));
}
BENCHMARK(BM_EnvelopeG)->Arg(0)->Arg(250)->Arg(1000);

void BM_Type2GridFill(benchmark::State& st) {
  const Type2 s;
  const TypeIIKernel k(s.pump, s.crystal);
  const GridSpec spec = auto_grid_spec(k, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(sample_grid(k, spec).norm);
  st.counters["points"] = static_cast<double>(spec.size());
}
BENCHMARK(BM_Type2GridFill)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Type1GridFill(benchmark::State& st) {
  const Type1 s;
  const TypeIKernel k(s.pump, s.crystal);
  const GridSpec spec = auto_grid_spec(k);
  for (auto _ : st) benchmark::DoNotOptimize(sample_grid(k, spec).norm);
  st.counters["points"] = static_cast<double>(spec.size());
}
BENCHMARK(BM_Type1GridFill)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_SpacetimeScanType2(benchmark::State& st) {
  const Type2 s;
  const Scheme sch = Scheme::type2_mzi(std::make_shared<TypeIIKernel>(s.pump, s.crystal));
  const auto axis = linear_axis(-600.0, 600.0, 0.1);
  for (auto _ : st) benchmark::DoNotOptimize(spacetime_scan(sch, {}, axis).rates.data());
}
BENCHMARK(BM_SpacetimeScanType2)->Unit(benchmark::kMillisecond);

void BM_SpacetimeScanFiltered(benchmark::State& st) {
  const Type2 s;
  const FilterPair f{SpectralFilter::from_nm(800.0, 10.0), SpectralFilter::from_nm(800.0, 10.0)};
  const auto axis = linear_axis(-900.0, 900.0, 0.15);
  for (auto _ : st) {
    const Scheme sch = Scheme::type2_mzi(make_kernel(s.pump, s.crystal, f));
    benchmark::DoNotOptimize(spacetime_scan(sch, {}, axis).rates.data());
  }
}
BENCHMARK(BM_SpacetimeScanFiltered)->Unit(benchmark::kMillisecond);

void BM_FitEnvelope(benchmark::State& st) {
  const Type2 s;
  const Scheme sch = Scheme::type2_mzi(std::make_shared<TypeIIKernel>(s.pump, s.crystal));
  const ScanResult r = spacetime_scan(sch, {}, linear_axis(-600.0, 600.0, 0.1));
  for (auto _ : st) benchmark::DoNotOptimize(fit_envelope(r).fwhm);
}
BENCHMARK(BM_FitEnvelope)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <map>

#include <benchmark/benchmark.h>

#include "circsynth/config.hpp"
#include "circsynth/freqresp.hpp"
#include "circsynth/linearize.hpp"
#include "circsynth/specmodel.hpp"

using namespace circsynth;

namespace {

// Linearized cell on a refined grid; order grows with the node count.
const LTISystem& model(int nodes) {
  static std::map<int, LTISystem> cache;
  auto it = cache.find(nodes);
  if (it == cache.end()) {
    ModelParams p;
    p.N_electrode = nodes;
    p.N_separator = nodes;
    it = cache.emplace(nodes, linearize(to_ode(assemble_cell(p)), p.c_init)).first;
  }
  return it->second;
}

void BM_FreqResponseSerial(benchmark::State& st) {
  const FrequencyResponse fr(model(static_cast<int>(st.range(0))));
  const Vec w = logspace(1e-6, 1e4, static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(fr.serial(w));
  st.SetItemsProcessed(st.iterations() * w.size());
}

void BM_FreqResponseParallel(benchmark::State& st) {
  const FrequencyResponse fr(model(static_cast<int>(st.range(0))));
  const Vec w = logspace(1e-6, 1e4, static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(fr.parallel(w));
  st.SetItemsProcessed(st.iterations() * w.size());
}

void BM_HinfSampled(benchmark::State& st) {
  const LTISystem& sys = model(static_cast<int>(st.range(0)));
  LTISystem stable = sys;
  // shift the integrators off the axis so the norm is finite
  stable.A -= 1e-3 * Mat::Identity(sys.order(), sys.order());
  const Vec w = logspace(1e-6, 1e4, 4000);
  const bool par = st.range(1) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(hinf_sampled(stable, w, par));
}

}  // namespace

BENCHMARK(BM_FreqResponseSerial)->Args({4, 20000})->Args({16, 20000})->Args({32, 20000})->UseRealTime();
BENCHMARK(BM_FreqResponseParallel)->Args({4, 20000})->Args({16, 20000})->Args({32, 20000})->UseRealTime();
BENCHMARK(BM_HinfSampled)->Args({16, 0})->Args({16, 1})->UseRealTime();

BENCHMARK_MAIN();

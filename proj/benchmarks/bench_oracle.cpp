// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

#include "nfk/analysis.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

using namespace nfk;

void BM_OracleExpm(benchmark::State& state) {
  ModelSpec s;
  s.d = 3;
  s.coupling = {CouplingSpec::Variant::NelsonUV, -0.8, INFINITY};
  s.grid = {1.0, 2};
  const Model m = resolve(s);
  const auto b = enumerate_basis(m.modes(), static_cast<int>(state.range(0)));
  const FockOperator H = build_hamiltonian(m, RVec::Zero(3), b);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_expm(H, 1.0));
  state.counters["dim"] = static_cast<double>(b->size());
}
BENCHMARK(BM_OracleExpm)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_MagnusPropagator(benchmark::State& state) {
  ModelSpec s;
  s.d = 1;
  s.coupling = {CouplingSpec::Variant::NelsonUV, -0.8, INFINITY};
  s.grid = {1.0, 2};
  const Model m = resolve(s);
  const auto b = enumerate_basis(2, 3);
  const TimeProfile prof = modulated_profile(m, 0.5, 3.0, 0.4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagator(m, prof, RVec::Zero(1), 0.0, 1.0, b, 1e-2));
  }
}
BENCHMARK(BM_MagnusPropagator)->Unit(benchmark::kMillisecond);

}  // namespace

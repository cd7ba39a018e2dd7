// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

#include "nfk/pathint.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

using namespace nfk;

ModelSpec cube(int cells) {
  ModelSpec s;
  s.d = 3;
  s.particle = {ParticleDispersion::Variant::NonRel, 0.0};
  s.boson = {BosonDispersion::Variant::Massive, 1.0};
  s.coupling = {CouplingSpec::Variant::NelsonUV, -0.5, INFINITY};
  s.grid = {1.0, cells};
  return s;
}

void BM_NelsonFunctionals(benchmark::State& state) {
  const Model m = resolve(cube(static_cast<int>(state.range(0))));
  const int J = static_cast<int>(state.range(1));
  const TimeProfile prof = nelson_profile(m);
  const LevyPath path = sample_path(process_for(m.spec), TimeGrid(0.0, 1.0, J), 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(compute_nelson_functionals(m, prof, path));
  state.counters["modes"] = m.modes();
}
BENCHMARK(BM_NelsonFunctionals)->Args({2, 64})->Args({4, 64})->Args({8, 256});

void BM_AssembleW(benchmark::State& state) {
  const Model m = resolve(cube(2));
  const auto b = enumerate_basis(m.modes(), static_cast<int>(state.range(0)));
  const TimeProfile prof = nelson_profile(m);
  const LevyPath path = sample_path(process_for(m.spec), TimeGrid(0.0, 1.0, 64), 1, 0);
  const PathFunctionals fn = compute_nelson_functionals(m, prof, path);
  WAssembler w(m, b);
  CMat out;
  for (auto _ : state) {
    w.assemble(fn, 1.0, nullptr, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["dim"] = static_cast<double>(b->size());
}
BENCHMARK(BM_AssembleW)->Arg(1)->Arg(2)->Arg(3);

void BM_McSemigroup(benchmark::State& state) {
  ModelSpec s = cube(2);
  s.d = 1;
  const Model m = resolve(s);
  const auto b = enumerate_basis(m.modes(), 2);
  McParams p;
  p.n_paths = static_cast<std::size_t>(state.range(0));
  p.J = 64;
  RVec P = RVec::Zero(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc_semigroup(m, nelson_profile(m), P, 0.0, 1.0, b, p));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McSemigroup)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

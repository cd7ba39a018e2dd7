// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

#include "nfk/fock.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace nfk;

void BM_EnumerateBasis(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0)), N = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_basis(M, N));
  state.counters["dim"] = basis_dimension(M, N);
}
BENCHMARK(BM_EnumerateBasis)->Args({2, 2})->Args({8, 2})->Args({12, 3})->Args({32, 2});

void BM_FSeriesEvaluate(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const auto b = enumerate_basis(M, 2);
  const FSeriesTable table(b);
  const CVec f = CVec::Random(M);
  const RVec omega = RVec::Ones(M);
  std::vector<cplx> out;
  for (auto _ : state) {
    table.evaluate(0.5, f, omega, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["pairs"] = static_cast<double>(table.num_pairs());
}
BENCHMARK(BM_FSeriesEvaluate)->Arg(2)->Arg(8)->Arg(12);

}  // namespace

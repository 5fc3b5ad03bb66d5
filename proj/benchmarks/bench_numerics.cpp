// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include <benchmark/benchmark.h>

#include "gatecut/matrix.hpp"
#include "gatecut/rng.hpp"

namespace {

gatecut::Matrix random(std::size_t r, std::size_t c, std::uint64_t seed) {
  gatecut::Rng rng(seed);
  gatecut::Matrix m(r, c);
  for (double& v : m.values()) v = rng.normal();
  return m;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const gatecut::Matrix a = random(n, n, 1), b = random(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(gatecut::matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_Matmul)->RangeMultiplier(2)->Range(32, 256);

void BM_MatmulNt(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const gatecut::Matrix a = random(128, n, 3), b = random(n, n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(gatecut::matmul_nt(a, b));
}
BENCHMARK(BM_MatmulNt)->Arg(128)->Arg(784);

void BM_RngNormal(benchmark::State& state) {
  gatecut::Rng rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(rng.normal());
}
BENCHMARK(BM_RngNormal);

}  // namespace

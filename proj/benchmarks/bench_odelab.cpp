// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include <benchmark/benchmark.h>

#include "gatecut/odelab.hpp"

namespace {

void BM_OdelabRhs(benchmark::State& state) {
  gatecut::HostShape shape;
  shape.units = static_cast<std::size_t>(state.range(0));
  const gatecut::Host host = gatecut::default_host(shape, 1);
  const gatecut::SubsystemState s = gatecut::state_from_host(host, 0.5, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(gatecut::rhs(host, s));
}
BENCHMARK(BM_OdelabRhs)->Arg(2)->Arg(6)->Arg(10);

void BM_OdelabIntegrate(benchmark::State& state) {
  const gatecut::Host host = gatecut::default_host(gatecut::HostShape{}, 1);
  const gatecut::SubsystemState s = gatecut::state_from_host(host, 0.5, 0.5);
  gatecut::IntegrateOptions opt;
  opt.dt = 1e-3;
  opt.t_end = 1.0;
  opt.record_every = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(gatecut::integrate(host, s, opt));
}
BENCHMARK(BM_OdelabIntegrate);

}  // namespace

BENCHMARK_MAIN();

// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include <benchmark/benchmark.h>

#include "gatecut/arch.hpp"
#include "gatecut/complexity.hpp"
#include "gatecut/network.hpp"
#include "gatecut/rng.hpp"

namespace {

struct Net {
  gatecut::NetworkSpec spec;
  gatecut::WeightSet w;
  gatecut::Matrix x, y;
};

Net make_net(std::size_t width, std::size_t blocks, std::size_t batch) {
  gatecut::MlpShape s;
  s.in = width;
  s.width = width;
  s.units = width;
  s.blocks = blocks;
  s.out = 10;
  s.task = gatecut::Task::classification;
  Net n;
  n.spec = gatecut::residual_mlp(s);
  gatecut::Rng rng(7);
  n.w = gatecut::init_weights(n.spec, rng);
  n.x = gatecut::Matrix(batch, width);
  for (double& v : n.x.values()) v = rng.normal();
  n.y = gatecut::Matrix(batch, 1);
  for (std::size_t r = 0; r < batch; ++r) n.y(r, 0) = static_cast<double>(rng.uniform_index(10));
  return n;
}

void BM_Forward(benchmark::State& state) {
  Net n = make_net(static_cast<std::size_t>(state.range(0)), 6, 128);
  const gatecut::GateField xi = gatecut::GateField::ones(n.spec);
  for (auto _ : state) benchmark::DoNotOptimize(gatecut::forward(n.spec, n.w, xi, n.x));
}
BENCHMARK(BM_Forward)->Arg(32)->Arg(128);

void BM_ForwardBackward(benchmark::State& state) {
  Net n = make_net(static_cast<std::size_t>(state.range(0)), 6, 128);
  const gatecut::GateField xi = gatecut::GateField::ones(n.spec);
  for (auto _ : state) {
    gatecut::ForwardTrace tr = gatecut::forward(n.spec, n.w, xi, n.x);
    benchmark::DoNotOptimize(gatecut::backward(n.spec, n.w, tr, n.y));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(32)->Arg(128);

void BM_GradJfp(benchmark::State& state) {
  Net n = make_net(128, 6, 1);
  const gatecut::ComplexityConsts c = gatecut::derive_consts(n.spec);
  const gatecut::GateField t = gatecut::GateField::filled(n.spec, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(gatecut::grad_jfp(t, c, 0.5, 0.5));
}
BENCHMARK(BM_GradJfp);

}  // namespace

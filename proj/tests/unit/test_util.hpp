// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <vector>

#include "gatecut/arch.hpp"
#include "gatecut/matrix.hpp"
#include "gatecut/network.hpp"
#include "gatecut/rng.hpp"

namespace gatecut::testing {

// One dense-skip block with an active path.
inline BlockSpec dense_block(std::size_t in, std::size_t k, std::size_t out, Activation act = Activation::relu,
                             GatePlan gates = {true, true, false}) {
  BlockSpec b;
  b.in = in;
  b.hidden = {k};
  b.out = out;
  b.act = act;
  b.skip = SkipKind::dense;
  b.path = PathKind::active;
  b.gates = gates;
  return b;
}

inline NetworkSpec single_block(std::size_t in, std::size_t k, std::size_t out, Activation act = Activation::relu,
                                GatePlan gates = {true, true, false}) {
  NetworkSpec s;
  s.blocks.push_back(dense_block(in, k, out, act, gates));
  return s;
}

inline Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (double& v : m.values()) v = scale * rng.normal();
  return m;
}

inline WeightSet random_weights(const NetworkSpec& spec, Rng& rng, double scale = 0.5) {
  WeightSet w = init_weights(spec, rng);
  for (auto& b : w.blocks)
    for (Matrix* m : {&b.w1, &b.w2, &b.w3})
      for (double& v : m->values()) v = scale * rng.normal();
  return w;
}

}  // namespace gatecut::testing

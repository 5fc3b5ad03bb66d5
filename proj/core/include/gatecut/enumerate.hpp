// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gatecut/arch.hpp"
#include "gatecut/complexity.hpp"
#include "gatecut/gates.hpp"
#include "gatecut/matrix.hpp"
#include "gatecut/network.hpp"
#include "gatecut/rng.hpp"

namespace gatecut {

constexpr std::size_t kMaxExactGates = 16;
constexpr std::size_t kMaxVertexGates = 12;

// Mean loss over the rows of (x, y) for one binary gate realization.
double vertex_cost(const NetworkSpec& spec, const WeightSet& w, const GateField& xi, const Matrix& x,
                   const Matrix& y);

// Costs at every {0,1} assignment of `gates`; bit i of the vertex index is
// gate i. All other entries of `base` must already be 0 or 1.
struct VertexTable {
  std::vector<GateId> gates;
  std::vector<double> cost;

  // Multilinear interpolation: sum_I prod_i theta_i^I_i (1-theta_i)^(1-I_i) c_I.
  double expected(const std::vector<double>& theta) const;
};

VertexTable build_vertex_table(const NetworkSpec& spec, const WeightSet& w, const GateField& base,
                               const std::vector<GateId>& gates, const Matrix& x, const Matrix& y,
                               std::size_t limit = kMaxExactGates);

// Exact C(W, Theta): enumerates every entry of theta lying strictly inside
// (0,1). Throws LimitError above kMaxExactGates such entries.
double expected_cost(const NetworkSpec& spec, const WeightSet& w, const GateField& theta, const Matrix& x,
                     const Matrix& y);

// Exact dC/dtheta for one gate via the conditional-cost difference:
// block: C^1 - C^0; unit: theta_B (C^1_{1,1} - C^1_{1,0}); input: C_1 - C_0.
double theta_grad_exact(const NetworkSpec& spec, const WeightSet& w, const GateField& theta, const Matrix& x,
                        const Matrix& y, const GateId& id);

struct Objective {
  double nu = 0.0;
  double alpha = 0.0;
  double beta = 0.5;
  double lambda = 0.0;
};

struct VertexReport {
  std::size_t gates = 0;
  double min_vertex = 0.0;
  double min_interior = 0.0;
  double max_midpoint_residual = 0.0;
  std::vector<double> best_vertex;  // argmin over vertices, one entry per gate
  bool vertex_wins = false;         // min_vertex <= min_interior + tol
};

// L(W, Theta) = C + lambda/2 |W|^2 + nu J_FP evaluated at every vertex of the
// free gates of `state` and at `trials` uniform interior points.
VertexReport vertex_verify(const NetworkSpec& spec, const WeightSet& w, const GateState& state, const Matrix& x,
                           const Matrix& y, const Objective& obj, std::size_t trials, Rng& rng,
                           double tol = 1e-9);

}  // namespace gatecut

// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gatecut/arch.hpp"
#include "gatecut/network.hpp"
#include "gatecut/rng.hpp"

namespace gatecut {

enum class GateKind { block, unit, input };
const char* to_string(GateKind k);

struct GateId {
  GateKind kind = GateKind::block;
  std::size_t block = 0;
  std::size_t index = 0;  // unused for block gates
  bool operator==(const GateId&) const = default;
};

double& at(GateField& f, const GateId& id);
double at(const GateField& f, const GateId& id);

struct BlockGates {
  GatePlan plan;          // which multipliers are learned
  bool has_path = false;  // declared with an active nonlinear path
  double theta_b = 0.0;
  bool alive_b = false;
  std::vector<double> theta_unit;
  std::vector<char> alive_unit;
  std::vector<double> theta_input;
  std::vector<char> alive_input;
  bool operator==(const BlockGates&) const = default;
};

// Variational parameters plus alive masks. Dead structures keep theta = 0
// and alive = false forever; indices stay stable until compaction.
struct GateState {
  std::vector<BlockGates> blocks;
  bool frozen = false;  // set by finalize rounding

  static GateState init(const NetworkSpec& spec, double theta0);

  // Effective Bernoulli parameters: learned value for live gated entries,
  // 1 for live ungated entries, 0 for dead ones and path-less blocks.
  GateField theta() const;
  // Live, learned gates in sampling order.
  std::vector<GateId> free_gates() const;
  bool is_free(const GateId& id) const;
  bool path_alive(std::size_t l) const { return blocks[l].has_path && blocks[l].alive_b; }
  bool operator==(const GateState&) const = default;
};

void check_shapes(const NetworkSpec& spec, const GateState& g);

// p(pi | gamma) = (gamma - 1)/log(gamma) / (1 + (gamma - 1)(1 - pi))
double flattening_pdf(double pi, double gamma);
// argmin_pi J(pi; theta) = gamma theta / (1 + theta (gamma - 1))
double pi_star(double theta, double gamma);
// J(pi*(theta); theta) = (1 - theta) log gamma
double j_flat(double theta, double gamma);

// Clamps every live learned theta to [0, 1]; dead entries stay 0.
void project_theta(GateState& state);

// One uniform per live learned gate, in free_gates() order. Dead entries
// sample 0, ungated entries sample 1.
GateField sample(const GateState& state, Rng& rng);

}  // namespace gatecut

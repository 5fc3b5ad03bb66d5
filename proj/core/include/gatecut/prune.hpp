// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gatecut/arch.hpp"
#include "gatecut/gates.hpp"
#include "gatecut/network.hpp"
#include "gatecut/optim.hpp"

namespace gatecut {

struct PruneEvent {
  std::size_t epoch = 0;
  GateKind kind = GateKind::block;
  std::size_t block = 0;
  std::size_t index = 0;
  double theta = 0.0;
  std::string reason;  // "theta" or "units" (block lost all of its units)
};

std::string format_event(const PruneEvent& e);

// Marks every live learned gate with theta <= tol dead and zeroes the weights
// it owns: a unit's W1 row and W2 column; a block's W1 and W2; an input's W1
// and W3 columns in its block and the W2/W3 rows feeding it. A block also
// dies when all of its units are dead. Optimizer state of removed weights
// and gates is cleared when given.
std::vector<PruneEvent> prune_pass(const NetworkSpec& spec, WeightSet& w, GateState& g, double tol,
                                   std::size_t epoch, SgdMomentum* sgd = nullptr, AdamTheta* adam = nullptr);

// Rounds every live learned theta to 0 or 1 (0.5 goes to 1) and freezes
// the gate state.
void finalize_round(GateState& g);

struct CompactNet {
  NetworkSpec spec;
  WeightSet weights;
  GateState gates;
};

// Physically removes dead units, inputs and paths. Throws ShapeError if a
// block would be left with no inputs or outputs.
CompactNet compact(const NetworkSpec& spec, const WeightSet& w, const GateState& g);

}  // namespace gatecut

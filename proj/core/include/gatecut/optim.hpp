// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gatecut/gates.hpp"
#include "gatecut/network.hpp"

namespace gatecut {

enum class ScheduleKind { constant, piecewise, cosine, cosine_restarts };
ScheduleKind parse_schedule(const std::string& s);
const char* to_string(ScheduleKind k);

// Learning rate as a function of (fractional) epoch.
struct LrSchedule {
  ScheduleKind kind = ScheduleKind::constant;
  double base = 0.1;
  std::vector<double> milestones;  // piecewise: multiply by `factor` at each
  double factor = 0.1;
  double total = 1.0;        // cosine: epochs until the rate reaches 0
  double period = 1.0;       // restarts: length of the first cycle in epochs
  double period_mult = 1.0;  // restarts: cycle growth factor

  double at(double epoch) const;
};

// PyTorch-style heavy ball: v = mu v + (g + lambda W); W -= lr v.
struct SgdMomentum {
  double momentum = 0.9;
  WeightSet velocity;

  void reset(const WeightSet& like);
  // Throws NumericError naming the block if the update is not finite.
  void step(WeightSet& w, const WeightSet& grad, double lr, double lambda);
};

// Adam on the live learned gates, followed by projection onto [0,1].
struct AdamTheta {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  GateField m;
  GateField v;
  std::uint64_t t = 0;

  void reset(const GateField& like);
  void step(GateState& state, const GateField& grad, double lr);
};

}  // namespace gatecut

// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include "gatecut/optim.hpp"

#include <cmath>
#include <numbers>

#include "gatecut/error.hpp"

namespace gatecut {

ScheduleKind parse_schedule(const std::string& s) {
  if (s == "constant") return ScheduleKind::constant;
  if (s == "piecewise") return ScheduleKind::piecewise;
  if (s == "cosine") return ScheduleKind::cosine;
  if (s == "cosine_restarts") return ScheduleKind::cosine_restarts;
  throw DomainError("unknown schedule '" + s + "'");
}

const char* to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::piecewise: return "piecewise";
    case ScheduleKind::cosine: return "cosine";
    case ScheduleKind::cosine_restarts: return "cosine_restarts";
  }
  return "?";
}

double LrSchedule::at(double epoch) const {
  switch (kind) {
    case ScheduleKind::constant: return base;
    case ScheduleKind::piecewise: {
      double lr = base;
      for (double m : milestones)
        if (epoch >= m) lr *= factor;
      return lr;
    }
    case ScheduleKind::cosine: {
      if (total <= 0.0) return base;
      double x = std::min(epoch / total, 1.0);
      return 0.5 * base * (1.0 + std::cos(std::numbers::pi * x));
    }
    case ScheduleKind::cosine_restarts: {
      double len = period > 0.0 ? period : 1.0;
      double e = epoch;
      while (e >= len) {
        e -= len;
        len *= period_mult;
      }
      return 0.5 * base * (1.0 + std::cos(std::numbers::pi * e / len));
    }
  }
  return base;
}

void SgdMomentum::reset(const WeightSet& like) {
  velocity = like;
  for (auto& b : velocity.blocks) {
    b.w1.fill(0.0);
    b.w2.fill(0.0);
    b.w3.fill(0.0);
  }
}

namespace {

void update(Matrix& w, Matrix& v, const Matrix& g, double lr, double lambda, double mu, std::size_t block,
            const char* name) {
  if (w.empty()) return;
  if (g.rows() != w.rows() || g.cols() != w.cols() || v.rows() != w.rows() || v.cols() != w.cols())
    throw ShapeError("sgd: gradient shape mismatch in block " + std::to_string(block) + " " + name);
  double* wd = w.data();
  double* vd = v.data();
  const double* gd = g.data();
  for (std::size_t i = 0; i < w.size(); ++i) {
    vd[i] = mu * vd[i] + (gd[i] + lambda * wd[i]);
    wd[i] -= lr * vd[i];
  }
  if (!all_finite(w)) throw NumericError("sgd: non-finite update in block " + std::to_string(block) + " " + name);
}

}  // namespace

void SgdMomentum::step(WeightSet& w, const WeightSet& grad, double lr, double lambda) {
  if (velocity.blocks.size() != w.blocks.size()) reset(w);
  for (std::size_t l = 0; l < w.blocks.size(); ++l) {
    update(w.blocks[l].w1, velocity.blocks[l].w1, grad.blocks[l].w1, lr, lambda, momentum, l, "W1");
    update(w.blocks[l].w2, velocity.blocks[l].w2, grad.blocks[l].w2, lr, lambda, momentum, l, "W2");
    update(w.blocks[l].w3, velocity.blocks[l].w3, grad.blocks[l].w3, lr, lambda, momentum, l, "W3");
  }
}

void AdamTheta::reset(const GateField& like) {
  m = like;
  v = like;
  for (auto* f : {&m, &v}) {
    for (double& x : f->block) x = 0.0;
    for (auto& u : f->unit) std::fill(u.begin(), u.end(), 0.0);
    for (auto& u : f->input) std::fill(u.begin(), u.end(), 0.0);
  }
  t = 0;
}

void AdamTheta::step(GateState& state, const GateField& grad, double lr) {
  if (m.block.size() != state.blocks.size()) reset(grad);
  ++t;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  auto upd = [&](double& theta, double& mm, double& vv, double g) {
    mm = beta1 * mm + (1.0 - beta1) * g;
    vv = beta2 * vv + (1.0 - beta2) * g * g;
    theta -= lr * (mm / c1) / (std::sqrt(vv / c2) + eps);
  };
  for (const GateId& id : state.free_gates()) {
    BlockGates& b = state.blocks[id.block];
    double* theta = nullptr;
    switch (id.kind) {
      case GateKind::block: theta = &b.theta_b; break;
      case GateKind::unit: theta = &b.theta_unit[id.index]; break;
      case GateKind::input: theta = &b.theta_input[id.index]; break;
    }
    upd(*theta, at(m, id), at(v, id), at(grad, id));
  }
  project_theta(state);
}

}  // namespace gatecut

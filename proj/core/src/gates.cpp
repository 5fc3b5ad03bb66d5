// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include "gatecut/gates.hpp"

#include <algorithm>
#include <cmath>

#include "gatecut/error.hpp"

namespace gatecut {

const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::block: return "block";
    case GateKind::unit: return "unit";
    case GateKind::input: return "input";
  }
  return "?";
}

double& at(GateField& f, const GateId& id) {
  switch (id.kind) {
    case GateKind::block: return f.block.at(id.block);
    case GateKind::unit: return f.unit.at(id.block).at(id.index);
    case GateKind::input: return f.input.at(id.block).at(id.index);
  }
  throw DomainError("bad gate kind");
}

double at(const GateField& f, const GateId& id) { return at(const_cast<GateField&>(f), id); }

GateState GateState::init(const NetworkSpec& spec, double theta0) {
  if (!(theta0 >= 0.0 && theta0 <= 1.0)) throw DomainError("initial theta must lie in [0,1]");
  GateState s;
  for (const auto& b : spec.blocks) {
    BlockGates g;
    g.plan = b.gates;
    g.has_path = b.has_path();
    g.alive_b = g.has_path;
    g.theta_b = g.has_path ? (b.gates.block ? theta0 : 1.0) : 0.0;
    std::size_t k = g.has_path ? b.units() : 0;
    g.theta_unit.assign(k, b.gates.unit ? theta0 : 1.0);
    g.alive_unit.assign(k, 1);
    g.theta_input.assign(b.in, b.gates.input ? theta0 : 1.0);
    g.alive_input.assign(b.in, 1);
    s.blocks.push_back(std::move(g));
  }
  return s;
}

GateField GateState::theta() const {
  GateField f;
  for (const auto& g : blocks) {
    f.block.push_back(g.has_path && g.alive_b ? g.theta_b : 0.0);
    std::vector<double> u(g.theta_unit.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = g.alive_unit[i] ? g.theta_unit[i] : 0.0;
    std::vector<double> in(g.theta_input.size());
    for (std::size_t j = 0; j < in.size(); ++j) in[j] = g.alive_input[j] ? g.theta_input[j] : 0.0;
    f.unit.push_back(std::move(u));
    f.input.push_back(std::move(in));
  }
  return f;
}

std::vector<GateId> GateState::free_gates() const {
  std::vector<GateId> ids;
  for (std::size_t l = 0; l < blocks.size(); ++l) {
    const BlockGates& g = blocks[l];
    if (g.plan.block && g.has_path && g.alive_b) ids.push_back({GateKind::block, l, 0});
    if (g.plan.unit)
      for (std::size_t i = 0; i < g.theta_unit.size(); ++i)
        if (g.alive_unit[i]) ids.push_back({GateKind::unit, l, i});
    if (g.plan.input)
      for (std::size_t j = 0; j < g.theta_input.size(); ++j)
        if (g.alive_input[j]) ids.push_back({GateKind::input, l, j});
  }
  return ids;
}

bool GateState::is_free(const GateId& id) const {
  const BlockGates& g = blocks.at(id.block);
  switch (id.kind) {
    case GateKind::block: return g.plan.block && g.has_path && g.alive_b;
    case GateKind::unit: return g.plan.unit && g.alive_unit.at(id.index);
    case GateKind::input: return g.plan.input && g.alive_input.at(id.index);
  }
  return false;
}

void check_shapes(const NetworkSpec& spec, const GateState& g) {
  if (g.blocks.size() != spec.blocks.size()) throw ShapeError("gate state has wrong block count");
  for (std::size_t l = 0; l < spec.blocks.size(); ++l) {
    const auto& b = spec.blocks[l];
    const auto& s = g.blocks[l];
    std::size_t k = b.has_path() ? b.units() : 0;
    if (s.theta_unit.size() != k || s.alive_unit.size() != k || s.theta_input.size() != b.in ||
        s.alive_input.size() != b.in || s.has_path != b.has_path())
      throw ShapeError("gate state does not match block " + std::to_string(l));
  }
}

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma=" + std::to_string(gamma) + " outside (0,1)");
}

void check_prob(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(what) + "=" + std::to_string(p) + " outside [0,1]");
}

}  // namespace

double flattening_pdf(double pi, double gamma) {
  check_gamma(gamma);
  check_prob(pi, "pi");
  return (gamma - 1.0) / std::log(gamma) / (1.0 + (gamma - 1.0) * (1.0 - pi));
}

double pi_star(double theta, double gamma) {
  check_gamma(gamma);
  check_prob(theta, "theta");
  if (theta == 1.0) return 1.0;
  return gamma * theta / (1.0 + theta * (gamma - 1.0));
}

double j_flat(double theta, double gamma) {
  check_gamma(gamma);
  check_prob(theta, "theta");
  return (1.0 - theta) * std::log(gamma);
}

void project_theta(GateState& state) {
  for (auto& g : state.blocks) {
    if (g.has_path) {
      if (!g.alive_b) g.theta_b = 0.0;
      else if (g.plan.block) g.theta_b = std::clamp(g.theta_b, 0.0, 1.0);
    }
    for (std::size_t i = 0; i < g.theta_unit.size(); ++i) {
      if (!g.alive_unit[i]) g.theta_unit[i] = 0.0;
      else if (g.plan.unit) g.theta_unit[i] = std::clamp(g.theta_unit[i], 0.0, 1.0);
    }
    for (std::size_t j = 0; j < g.theta_input.size(); ++j) {
      if (!g.alive_input[j]) g.theta_input[j] = 0.0;
      else if (g.plan.input) g.theta_input[j] = std::clamp(g.theta_input[j], 0.0, 1.0);
    }
  }
}

GateField sample(const GateState& state, Rng& rng) {
  GateField f = state.theta();
  for (std::size_t l = 0; l < state.blocks.size(); ++l) {
    const BlockGates& g = state.blocks[l];
    if (g.plan.block && g.has_path && g.alive_b) f.block[l] = rng.uniform() < g.theta_b ? 1.0 : 0.0;
    if (g.plan.unit)
      for (std::size_t i = 0; i < g.theta_unit.size(); ++i)
        if (g.alive_unit[i]) f.unit[l][i] = rng.uniform() < g.theta_unit[i] ? 1.0 : 0.0;
    if (g.plan.input)
      for (std::size_t j = 0; j < g.theta_input.size(); ++j)
        if (g.alive_input[j]) f.input[l][j] = rng.uniform() < g.theta_input[j] ? 1.0 : 0.0;
  }
  return f;
}

}  // namespace gatecut

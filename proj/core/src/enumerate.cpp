// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include "gatecut/enumerate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gatecut/error.hpp"
#include "gatecut/parallel.hpp"

namespace gatecut {

double vertex_cost(const NetworkSpec& spec, const WeightSet& w, const GateField& xi, const Matrix& x,
                   const Matrix& y) {
  ForwardTrace tr = forward(spec, w, xi, x);
  return loss(tr.y, y, spec.task);
}

double VertexTable::expected(const std::vector<double>& theta) const {
  if (theta.size() != gates.size()) throw ShapeError("VertexTable::expected: wrong theta length");
  // Contract the lowest bit first: t'[j] = (1-th) t[2j] + th t[2j+1].
  std::vector<double> t = cost;
  std::size_t n = t.size();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double th = theta[i];
    n /= 2;
    for (std::size_t j = 0; j < n; ++j) t[j] = (1.0 - th) * t[2 * j] + th * t[2 * j + 1];
  }
  return t[0];
}

VertexTable build_vertex_table(const NetworkSpec& spec, const WeightSet& w, const GateField& base,
                               const std::vector<GateId>& gates, const Matrix& x, const Matrix& y,
                               std::size_t limit) {
  if (gates.size() > limit)
    throw LimitError("enumeration over " + std::to_string(gates.size()) + " gates exceeds the limit of " +
                     std::to_string(limit));
  {
    GateField probe = base;
    for (const auto& g : gates) at(probe, g) = 0.0;
    for (double v : probe.flatten())
      if (v != 0.0 && v != 1.0) throw DomainError("vertex table: unlisted gate with fractional value " + std::to_string(v));
  }
  VertexTable t;
  t.gates = gates;
  const std::size_t nv = std::size_t(1) << gates.size();
  t.cost.assign(nv, 0.0);
  parallel_for(nv, [&](std::size_t b, std::size_t e) {
    GateField xi = base;
    for (std::size_t v = b; v < e; ++v) {
      for (std::size_t i = 0; i < gates.size(); ++i) at(xi, gates[i]) = (v >> i) & 1u ? 1.0 : 0.0;
      t.cost[v] = vertex_cost(spec, w, xi, x, y);
    }
  });
  return t;
}

namespace {

std::vector<GateId> fractional_entries(const GateField& theta) {
  std::vector<GateId> ids;
  for (std::size_t l = 0; l < theta.block.size(); ++l) {
    auto frac = [](double v) { return v > 0.0 && v < 1.0; };
    auto check = [](double v) {
      if (!(v >= 0.0 && v <= 1.0)) throw DomainError("theta value " + std::to_string(v) + " outside [0,1]");
    };
    check(theta.block[l]);
    if (frac(theta.block[l])) ids.push_back({GateKind::block, l, 0});
    for (std::size_t i = 0; i < theta.unit[l].size(); ++i) {
      check(theta.unit[l][i]);
      if (frac(theta.unit[l][i])) ids.push_back({GateKind::unit, l, i});
    }
    for (std::size_t j = 0; j < theta.input[l].size(); ++j) {
      check(theta.input[l][j]);
      if (frac(theta.input[l][j])) ids.push_back({GateKind::input, l, j});
    }
  }
  return ids;
}

}  // namespace

double expected_cost(const NetworkSpec& spec, const WeightSet& w, const GateField& theta, const Matrix& x,
                     const Matrix& y) {
  auto ids = fractional_entries(theta);
  if (ids.size() > kMaxExactGates)
    throw LimitError("exact cost needs enumeration over " + std::to_string(ids.size()) +
                     " stochastic gates (limit " + std::to_string(kMaxExactGates) + ")");
  VertexTable t = build_vertex_table(spec, w, theta, ids, x, y);
  std::vector<double> th;
  for (const auto& id : ids) th.push_back(at(theta, id));
  return t.expected(th);
}

double theta_grad_exact(const NetworkSpec& spec, const WeightSet& w, const GateField& theta, const Matrix& x,
                        const Matrix& y, const GateId& id) {
  auto cond = [&](std::vector<std::pair<GateId, double>> fix) {
    GateField t = theta;
    for (auto& [g, v] : fix) at(t, g) = v;
    return expected_cost(spec, w, t, x, y);
  };
  switch (id.kind) {
    case GateKind::block:
      return cond({{id, 1.0}}) - cond({{id, 0.0}});
    case GateKind::unit: {
      GateId b{GateKind::block, id.block, 0};
      const double tb = theta.block.at(id.block);
      if (tb == 0.0) return 0.0;
      return tb * (cond({{b, 1.0}, {id, 1.0}}) - cond({{b, 1.0}, {id, 0.0}}));
    }
    case GateKind::input:
      return cond({{id, 1.0}}) - cond({{id, 0.0}});
  }
  return 0.0;
}

VertexReport vertex_verify(const NetworkSpec& spec, const WeightSet& w, const GateState& state, const Matrix& x,
                           const Matrix& y, const Objective& obj, std::size_t trials, Rng& rng, double tol) {
  auto gates = state.free_gates();
  if (gates.size() > kMaxVertexGates)
    throw LimitError("vertex verification over " + std::to_string(gates.size()) + " gates exceeds the limit of " +
                     std::to_string(kMaxVertexGates));
  ComplexityConsts consts = derive_consts(spec);
  GateField base = state.theta();
  for (const auto& g : gates) at(base, g) = 0.0;
  VertexTable table = build_vertex_table(spec, w, base, gates, x, y, kMaxVertexGates);
  const double wreg = 0.5 * obj.lambda * w.squared_norm();

  auto objective = [&](const std::vector<double>& th) {
    GateField f = base;
    for (std::size_t i = 0; i < gates.size(); ++i) at(f, gates[i]) = th[i];
    return table.expected(th) + wreg + obj.nu * j_fp(f, consts, obj.alpha, obj.beta);
  };

  VertexReport r;
  r.gates = gates.size();
  r.min_vertex = std::numeric_limits<double>::infinity();
  const std::size_t nv = std::size_t(1) << gates.size();
  std::vector<double> th(gates.size());
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t i = 0; i < gates.size(); ++i) th[i] = (v >> i) & 1u ? 1.0 : 0.0;
    double L = objective(th);
    if (L < r.min_vertex) {
      r.min_vertex = L;
      r.best_vertex = th;
    }
  }
  r.min_interior = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < trials; ++k) {
    for (double& t : th) t = rng.uniform();
    double L = objective(th);
    r.min_interior = std::min(r.min_interior, L);
    // Midpoint residual on every coordinate at the first few points.
    if (k < 5) {
      for (std::size_t i = 0; i < th.size(); ++i) {
        double keep = th[i];
        th[i] = 0.0;
        double l0 = objective(th);
        th[i] = 1.0;
        double l1 = objective(th);
        th[i] = 0.5;
        double lm = objective(th);
        th[i] = keep;
        r.max_midpoint_residual = std::max(r.max_midpoint_residual, std::abs(lm - 0.5 * (l0 + l1)));
      }
    }
  }
  if (gates.empty()) r.min_interior = r.min_vertex;
  r.vertex_wins = r.min_vertex <= r.min_interior + tol;
  return r;
}

}  // namespace gatecut

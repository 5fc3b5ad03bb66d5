// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include "gatecut/prune.hpp"

#include <iomanip>
#include <sstream>

#include "gatecut/error.hpp"

namespace gatecut {

std::string format_event(const PruneEvent& e) {
  std::ostringstream o;
  o << "epoch=" << e.epoch << " kind=" << to_string(e.kind) << " block=" << e.block;
  if (e.kind != GateKind::block) o << " index=" << e.index;
  o << " theta=" << std::setprecision(6) << e.theta << " reason=" << e.reason;
  return o.str();
}

namespace {

void zero_row(Matrix& m, std::size_t r) {
  if (m.empty()) return;
  std::fill(m.row(r), m.row(r) + m.cols(), 0.0);
}

void zero_col(Matrix& m, std::size_t c) {
  if (m.empty()) return;
  for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) = 0.0;
}

// Apply `fn` to the weights and, when present, the matching momentum buffers.
template <typename Fn>
void on_weights(WeightSet& w, SgdMomentum* sgd, std::size_t l, Fn fn) {
  fn(w.blocks[l]);
  if (sgd && sgd->velocity.blocks.size() == w.blocks.size()) fn(sgd->velocity.blocks[l]);
}

void clear_moment(AdamTheta* adam, const GateId& id) {
  if (!adam || adam->m.block.size() <= id.block) return;
  at(adam->m, id) = 0.0;
  at(adam->v, id) = 0.0;
}

void kill_unit(WeightSet& w, GateState& g, std::size_t l, std::size_t i, SgdMomentum* sgd, AdamTheta* adam) {
  BlockGates& b = g.blocks[l];
  b.alive_unit[i] = 0;
  b.theta_unit[i] = 0.0;
  on_weights(w, sgd, l, [&](BlockWeights& bw) {
    zero_row(bw.w1, i);
    zero_col(bw.w2, i);
  });
  clear_moment(adam, {GateKind::unit, l, i});
}

}  // namespace

std::vector<PruneEvent> prune_pass(const NetworkSpec& spec, WeightSet& w, GateState& g, double tol,
                                   std::size_t epoch, SgdMomentum* sgd, AdamTheta* adam) {
  check_shapes(spec, w);
  check_shapes(spec, g);
  std::vector<PruneEvent> events;
  for (std::size_t l = 0; l < spec.blocks.size(); ++l) {
    BlockGates& b = g.blocks[l];
    if (g.path_alive(l)) {
      bool block_dead = false;
      std::string reason;
      double theta_at = b.theta_b;
      if (b.plan.block && b.theta_b <= tol) {
        block_dead = true;
        reason = "theta";
      }
      if (b.plan.unit) {
        for (std::size_t i = 0; i < b.theta_unit.size(); ++i) {
          if (!b.alive_unit[i] || b.theta_unit[i] > tol) continue;
          if (!block_dead) events.push_back({epoch, GateKind::unit, l, i, b.theta_unit[i], "theta"});
          kill_unit(w, g, l, i, sgd, adam);
        }
      }
      bool any_unit = false;
      for (char a : b.alive_unit) any_unit = any_unit || a;
      if (!block_dead && !any_unit) {
        block_dead = true;
        reason = "units";
      }
      if (block_dead) {
        events.push_back({epoch, GateKind::block, l, 0, theta_at, reason});
        for (std::size_t i = 0; i < b.theta_unit.size(); ++i)
          if (b.alive_unit[i]) kill_unit(w, g, l, i, sgd, adam);
        b.alive_b = false;
        b.theta_b = 0.0;
        on_weights(w, sgd, l, [](BlockWeights& bw) {
          bw.w1.fill(0.0);
          bw.w2.fill(0.0);
        });
        clear_moment(adam, {GateKind::block, l, 0});
      }
    }
    if (b.plan.input) {
      for (std::size_t j = 0; j < b.theta_input.size(); ++j) {
        if (!b.alive_input[j] || b.theta_input[j] > tol) continue;
        events.push_back({epoch, GateKind::input, l, j, b.theta_input[j], "theta"});
        b.alive_input[j] = 0;
        b.theta_input[j] = 0.0;
        on_weights(w, sgd, l, [&](BlockWeights& bw) {
          zero_col(bw.w1, j);
          zero_col(bw.w3, j);
        });
        if (l > 0)
          on_weights(w, sgd, l - 1, [&](BlockWeights& bw) {
            zero_row(bw.w2, j);
            zero_row(bw.w3, j);
          });
        clear_moment(adam, {GateKind::input, l, j});
      }
    }
  }
  return events;
}

void finalize_round(GateState& g) {
  for (const GateId& id : g.free_gates()) {
    BlockGates& b = g.blocks[id.block];
    double* t = id.kind == GateKind::block ? &b.theta_b
                : id.kind == GateKind::unit ? &b.theta_unit[id.index]
                                             : &b.theta_input[id.index];
    *t = *t >= 0.5 ? 1.0 : 0.0;
  }
  g.frozen = true;
}

namespace {

std::vector<std::size_t> alive_indices(const std::vector<char>& alive) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < alive.size(); ++i)
    if (alive[i]) idx.push_back(i);
  return idx;
}

std::vector<std::size_t> with_bias(std::vector<std::size_t> cols, std::size_t bias) {
  cols.push_back(bias);
  return cols;
}

template <typename T>
std::vector<T> pick(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  for (std::size_t i : idx) out.push_back(v[i]);
  return out;
}

}  // namespace

CompactNet compact(const NetworkSpec& spec, const WeightSet& w, const GateState& g) {
  check_shapes(spec, w);
  check_shapes(spec, g);
  CompactNet out;
  out.spec.task = spec.task;
  out.spec.output = spec.output;
  out.gates.frozen = g.frozen;
  const std::size_t nb = spec.blocks.size();
  for (std::size_t l = 0; l < nb; ++l) {
    const BlockSpec& b = spec.blocks[l];
    const BlockGates& bg = g.blocks[l];
    const BlockWeights& bw = w.blocks[l];
    auto keep_in = alive_indices(bg.alive_input);
    std::vector<std::size_t> keep_out;
    if (l + 1 < nb) {
      keep_out = alive_indices(g.blocks[l + 1].alive_input);
    } else {
      for (std::size_t k = 0; k < b.out; ++k) keep_out.push_back(k);
    }
    const bool path = g.path_alive(l);
    auto keep_hidden = path ? alive_indices(bg.alive_unit) : std::vector<std::size_t>{};
    std::string tag = "block " + std::to_string(l) + (b.name.empty() ? "" : " (" + b.name + ")");
    if (keep_in.empty() || keep_out.empty())
      throw ShapeError("compaction would disconnect input from output at " + tag);

    BlockSpec nbk = b;
    nbk.in = keep_in.size();
    nbk.out = keep_out.size();
    BlockWeights nw;
    BlockGates ng;
    ng.plan = bg.plan;
    if (path && !keep_hidden.empty()) {
      nbk.hidden = {keep_hidden.size()};
      nbk.path = PathKind::active;
      nw.w1 = select_cols(select_rows(bw.w1, keep_hidden), with_bias(keep_in, b.in));
      nw.w2 = select_cols(select_rows(bw.w2, keep_out), keep_hidden);
      ng.has_path = true;
      ng.alive_b = true;
      ng.theta_b = bg.theta_b;
      ng.theta_unit = pick(bg.theta_unit, keep_hidden);
      ng.alive_unit.assign(keep_hidden.size(), 1);
    } else {
      nbk.hidden.clear();
      nbk.path = b.path == PathKind::none ? PathKind::none : PathKind::pruned;
      nbk.gates.block = nbk.gates.unit = false;
      ng.plan = nbk.gates;
      ng.has_path = false;
      ng.alive_b = false;
      ng.theta_b = 0.0;
    }
    if (b.skip == SkipKind::dense) {
      nw.w3 = select_cols(select_rows(bw.w3, keep_out), with_bias(keep_in, b.in));
    } else if (b.skip == SkipKind::identity) {
      std::vector<long> pos(b.in, -1);
      for (std::size_t k = 0; k < keep_in.size(); ++k) pos[keep_in[k]] = static_cast<long>(k);
      std::vector<long> map;
      bool plain = keep_in.size() == keep_out.size();
      for (std::size_t k = 0; k < keep_out.size(); ++k) {
        std::size_t o = keep_out[k];
        long src = b.skip_map.empty() ? static_cast<long>(o) : b.skip_map[o];
        long m = src < 0 ? -1 : pos[static_cast<std::size_t>(src)];
        map.push_back(m);
        plain = plain && m == static_cast<long>(k);
      }
      nbk.skip_map = plain ? std::vector<long>{} : map;
    }
    ng.theta_input = pick(bg.theta_input, keep_in);
    ng.alive_input.assign(keep_in.size(), 1);
    out.spec.blocks.push_back(std::move(nbk));
    out.weights.blocks.push_back(std::move(nw));
    out.gates.blocks.push_back(std::move(ng));
  }
  validate(out.spec);
  return out;
}

}  // namespace gatecut

// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gatecut/complexity.hpp"
#include "gatecut/enumerate.hpp"
#include "gatecut/error.hpp"
#include "gatecut/finite_diff.hpp"
#include "gatecut/gates.hpp"
#include "gatecut/network.hpp"
#include "gatecut/prune.hpp"

namespace gatecut::cli {

Fault parse_fault(const std::string& s) {
  if (s == "none") return Fault::none;
  if (s == "gamma_sign") return Fault::gamma_sign;
  throw DomainError("unknown fault '" + s + "' (none|gamma_sign)");
}

namespace {

struct Instance {
  NetworkSpec spec;
  WeightSet w;
  GateState gates;
  Matrix x;
  Matrix y;
};

std::size_t gate_count(const NetworkSpec& spec) {
  std::size_t n = 0;
  for (const auto& b : spec.blocks) {
    if (b.gates.block) ++n;
    if (b.gates.unit) n += b.units();
    if (b.gates.input) n += b.in;
  }
  return n;
}

// Small gated residual nets with at most `max_gates` learned gates, random
// biases and interior thetas.
Instance random_instance(Rng& rng, std::size_t max_gates, bool smooth) {
  const Activation acts[] = {Activation::tanh, Activation::softplus, Activation::relu};
  for (;;) {
    Instance in;
    in.spec.task = rng.uniform() < 0.5 ? Task::regression : Task::classification;
    const std::size_t nb = 1 + rng.uniform_index(2);
    std::size_t width = 1 + rng.uniform_index(3);
    const std::size_t input = width;
    for (std::size_t l = 0; l < nb; ++l) {
      BlockSpec b;
      b.in = width;
      b.hidden = {1 + rng.uniform_index(2)};
      const bool last = l + 1 == nb;
      b.out = last ? (in.spec.task == Task::classification ? 2 + rng.uniform_index(2) : 1 + rng.uniform_index(2))
                   : 1 + rng.uniform_index(3);
      b.act = acts[rng.uniform_index(smooth ? 2 : 3)];
      b.pre = l > 0 && rng.uniform() < 0.5 ? Activation::tanh : Activation::identity;
      b.skip = b.in == b.out && rng.uniform() < 0.5 ? SkipKind::identity : SkipKind::dense;
      b.gates = {true, true, l > 0 && rng.uniform() < 0.6};
      in.spec.blocks.push_back(b);
      width = b.out;
    }
    if (gate_count(in.spec) > max_gates) continue;
    validate(in.spec);
    in.w = init_weights(in.spec, rng);
    for (auto& b : in.w.blocks)
      for (Matrix* m : {&b.w1, &b.w3})
        if (!m->empty())
          for (std::size_t r = 0; r < m->rows(); ++r) (*m)(r, m->cols() - 1) = rng.uniform(-0.5, 0.5);
    in.gates = GateState::init(in.spec, 0.5);
    for (const GateId& id : in.gates.free_gates()) {
      BlockGates& g = in.gates.blocks[id.block];
      double v = rng.uniform(0.05, 0.95);
      if (id.kind == GateKind::block) g.theta_b = v;
      else if (id.kind == GateKind::unit) g.theta_unit[id.index] = v;
      else g.theta_input[id.index] = v;
    }
    const std::size_t n = 6;
    in.x = Matrix(n, input);
    for (double& v : in.x.values()) v = rng.normal();
    const std::size_t out = in.spec.output_width();
    if (in.spec.task == Task::classification) {
      in.y = Matrix(n, 1);
      for (double& v : in.y.values()) v = static_cast<double>(rng.uniform_index(out));
    } else {
      in.y = Matrix(n, out);
      for (double& v : in.y.values()) v = rng.normal();
    }
    return in;
  }
}

std::vector<double> flat_weights(const WeightSet& w) {
  std::vector<double> v;
  for (const auto& b : w.blocks)
    for (const Matrix* m : {&b.w1, &b.w2, &b.w3}) v.insert(v.end(), m->values().begin(), m->values().end());
  return v;
}

void unflatten(WeightSet& w, const std::vector<double>& v) {
  std::size_t k = 0;
  for (auto& b : w.blocks)
    for (Matrix* m : {&b.w1, &b.w2, &b.w3})
      for (double& x : m->values()) x = v[k++];
}

double& theta_ref(GateState& s, const GateId& id) {
  BlockGates& b = s.blocks[id.block];
  if (id.kind == GateKind::block) return b.theta_b;
  if (id.kind == GateKind::unit) return b.theta_unit[id.index];
  return b.theta_input[id.index];
}

// J(pi; theta) of the flattening hyper-prior, minimized by a grid search.
double j_pi(double pi, double theta, double gamma) {
  auto xlogy = [](double a, double b) { return a == 0.0 ? 0.0 : a * std::log(a / b); };
  return xlogy(1.0 - theta, 1.0 - pi) + xlogy(theta, pi) + std::log(1.0 + (gamma - 1.0) * (1.0 - pi));
}

Check check_gate_math(Rng& rng) {
  Check c{"gate_math", true, 0.0, 1e-6, ""};
  double worst_pdf = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double theta = rng.uniform(0.01, 0.99);
    const double gamma = std::exp(rng.uniform(-6.0, -0.01));
    double best = 1e300, arg = 0.0;
    for (int i = 1; i < 1000; ++i) {
      const double p = i * 1e-3;
      const double j = j_pi(p, theta, gamma);
      if (j < best) best = j, arg = p;
    }
    // Ternary refinement around the grid minimum.
    double lo = std::max(1e-12, arg - 1e-3), hi = std::min(1.0 - 1e-12, arg + 1e-3);
    for (int it = 0; it < 200; ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (j_pi(m1, theta, gamma) < j_pi(m2, theta, gamma)) hi = m2;
      else lo = m1;
    }
    arg = 0.5 * (lo + hi);
    best = j_pi(arg, theta, gamma);
    c.worst = std::max({c.worst, std::abs(arg - pi_star(theta, gamma)), std::abs(best - j_flat(theta, gamma))});
    // Simpson rule on [0,1].
    const int n = 20000;
    double s = flattening_pdf(0.0, gamma) + flattening_pdf(1.0, gamma);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * flattening_pdf(static_cast<double>(i) / n, gamma);
    worst_pdf = std::max(worst_pdf, std::abs(s / (3.0 * n) - 1.0));
  }
  c.pass = c.worst <= c.limit && worst_pdf <= 1e-8;
  c.detail = "pdf integral error " + std::to_string(worst_pdf);
  return c;
}

Check check_weight_gradients(Rng& rng, std::size_t instances) {
  Check c{"weight_gradients", true, 0.0, 1e-5, "max relative error vs central differences"};
  for (std::size_t k = 0; k < instances; ++k) {
    Instance in = random_instance(rng, 12, true);
    GateField xi = GateField::ones(in.spec);
    for (const GateId& id : in.gates.free_gates()) at(xi, id) = rng.uniform(0.2, 1.0);
    ForwardTrace tr = forward(in.spec, in.w, xi, in.x);
    Gradients g = backward(in.spec, in.w, tr, in.y);
    auto f = [&](const std::vector<double>& v) {
      WeightSet w = in.w;
      unflatten(w, v);
      return loss(forward(in.spec, w, xi, in.x).y, in.y, in.spec.task);
    };
    auto fd = finite_diff_grad(f, flat_weights(in.w), 1e-5);
    c.worst = std::max(c.worst, max_rel_error(flat_weights(g.dw), fd, 1e-3));
    auto fx = [&](const std::vector<double>& v) {
      GateField z = xi;
      z.assign(v);
      return loss(forward(in.spec, in.w, z, in.x).y, in.y, in.spec.task);
    };
    auto fdx = finite_diff_grad(fx, xi.flatten(), 1e-5);
    c.worst = std::max(c.worst, max_rel_error(g.dxi.flatten(), fdx, 1e-3));
  }
  c.pass = c.worst <= c.limit;
  return c;
}

Check check_theta_gradients(Rng& rng, std::size_t instances) {
  Check c{"theta_gradient_exact", true, 0.0, 1e-9, "abs error vs enumerated central differences"};
  for (std::size_t k = 0; k < instances; ++k) {
    Instance in = random_instance(rng, 10, false);
    const GateField theta = in.gates.theta();
    for (const GateId& id : in.gates.free_gates()) {
      const double exact = theta_grad_exact(in.spec, in.w, theta, in.x, in.y, id);
      const double h = 1e-3;
      GateField p = theta, m = theta;
      at(p, id) += h;
      at(m, id) -= h;
      const double fd = (expected_cost(in.spec, in.w, p, in.x, in.y) - expected_cost(in.spec, in.w, m, in.x, in.y)) /
                        (2 * h);
      c.worst = std::max(c.worst, std::abs(exact - fd));
    }
  }
  c.pass = c.worst <= c.limit;
  return c;
}

Check check_grad_jfp(Rng& rng, std::size_t instances) {
  Check c{"complexity_gradient", true, 0.0, 1e-8, "abs error vs central differences"};
  for (std::size_t k = 0; k < instances; ++k) {
    Instance in = random_instance(rng, 12, false);
    const ComplexityConsts consts = derive_consts(in.spec);
    const double alpha = rng.uniform(0.0, 1.0), beta = rng.uniform(0.0, 1.0);
    const GateField theta = in.gates.theta();
    const GateField g = grad_jfp(theta, consts, alpha, beta);
    for (const GateId& id : in.gates.free_gates()) {
      const double h = 1e-4;
      GateField p = theta, m = theta;
      at(p, id) += h;
      at(m, id) -= h;
      const double fd = (j_fp(p, consts, alpha, beta) - j_fp(m, consts, alpha, beta)) / (2 * h);
      c.worst = std::max(c.worst, std::abs(at(g, id) - fd));
    }
  }
  c.pass = c.worst <= c.limit;
  return c;
}

void check_vertices(Rng& rng, const VerifyOptions& opt, Check& multi, Check& vert) {
  multi = {"multilinearity", true, 0.0, 1e-10, "max midpoint residual"};
  vert = {"vertex_optimum", true, 0.0, 0.0, "instances where an interior point beat every vertex"};
  for (std::size_t k = 0; k < opt.instances; ++k) {
    Instance in = random_instance(rng, kMaxVertexGates, false);
    Objective obj{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 0.1)};
    VertexReport r = vertex_verify(in.spec, in.w, in.gates, in.x, in.y, obj, opt.trials, rng);
    multi.worst = std::max(multi.worst, r.max_midpoint_residual);
    if (!r.vertex_wins) vert.worst += 1.0;
  }
  multi.pass = multi.worst <= multi.limit;
  vert.pass = vert.worst == 0.0;
}

Check check_compaction(Rng& rng, std::size_t instances) {
  Check c{"masked_compacted", true, 0.0, 1e-6, "max abs output difference"};
  std::size_t skipped = 0;
  for (std::size_t k = 0; k < instances; ++k) {
    Instance in = random_instance(rng, 12, false);
    for (const GateId& id : in.gates.free_gates())
      if (rng.uniform() < 0.3) theta_ref(in.gates, id) = 0.01;
    prune_pass(in.spec, in.w, in.gates, 0.1, 1);
    CompactNet cn;
    try {
      cn = compact(in.spec, in.w, in.gates);
    } catch (const ShapeError&) {
      ++skipped;  // pruning disconnected the network
      continue;
    }
    Matrix x(100, in.spec.input_width());
    for (double& v : x.values()) v = rng.normal();
    ForwardTrace a = forward(in.spec, in.w, in.gates.theta(), x);
    ForwardTrace b = forward(cn.spec, cn.weights, cn.gates.theta(), x);
    c.worst = std::max(c.worst, max_abs_diff(a.y, b.y));
  }
  c.pass = c.worst <= c.limit;
  c.detail += " (" + std::to_string(skipped) + " disconnected instances skipped)";
  return c;
}

Check check_schedule(Rng& rng, Fault fault) {
  Check c{"schedule_identity", true, 0.0, 1e-10, "relative error of nu J_FP vs the gamma penalty"};
  for (int k = 0; k < 50; ++k) {
    Instance in = random_instance(rng, 12, false);
    const ComplexityConsts consts = derive_consts(in.spec);
    const double nu = rng.uniform(0.01, 2.0), alpha = rng.uniform(0.0, 1.0), beta = rng.uniform(0.0, 1.0);
    const double n = static_cast<double>(1 + rng.uniform_index(100000));
    const GateField theta = in.gates.theta();
    GammaSchedule g = gamma_schedule(theta, consts, nu, alpha, beta, n);
    if (fault == Fault::gamma_sign)
      for (auto* v : {&g.log_gamma_b, &g.log_gamma_1, &g.log_gamma_2})
        for (double& x : *v) x = -x;
    const double lhs = nu * j_fp(theta, consts, alpha, beta);
    const double rhs = schedule_penalty(theta, g, n);
    c.worst = std::max(c.worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300));
  }
  c.pass = c.worst <= c.limit;
  return c;
}

}  // namespace

std::vector<Check> run_verify(const VerifyOptions& opt) {
  Rng root(opt.seed);
  std::vector<Check> out;
  Rng r1 = root.split(1), r2 = root.split(2), r3 = root.split(3), r4 = root.split(4), r5 = root.split(5),
      r6 = root.split(6), r7 = root.split(7);
  out.push_back(check_gate_math(r1));
  out.push_back(check_weight_gradients(r2, 10));
  out.push_back(check_theta_gradients(r3, 10));
  out.push_back(check_grad_jfp(r4, 10));
  Check multi, vert;
  check_vertices(r5, opt, multi, vert);
  out.push_back(multi);
  out.push_back(vert);
  out.push_back(check_compaction(r6, 20));
  out.push_back(check_schedule(r7, opt.fault));
  return out;
}

std::string verify_table(const std::vector<Check>& checks) {
  std::ostringstream o;
  o << "property               verdict  worst         limit\n";
  for (const auto& c : checks) {
    o.width(22);
    o << std::left << c.name << ' ';
    o.width(8);
    o << (c.pass ? "PASS" : "FAIL") << ' ';
    o.width(13);
    o << c.worst << ' ' << c.limit;
    if (!c.detail.empty()) o << "  " << c.detail;
    o << '\n';
  }
  return o.str();
}

}  // namespace gatecut::cli

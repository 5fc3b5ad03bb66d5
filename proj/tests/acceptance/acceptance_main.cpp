// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance            run all criteria
//   acceptance 2 5 8      run a subset
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "gatecut/arch.hpp"
#include "gatecut/complexity.hpp"
#include "gatecut/enumerate.hpp"
#include "gatecut/gates.hpp"
#include "gatecut/network.hpp"
#include "gatecut/odelab.hpp"
#include "gatecut/prune.hpp"
#include "gatecut/rng.hpp"
#include "gatecut/trainer.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace gatecut;
using gatecut::testing::dense_block;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int prec = 4) {
  std::ostringstream s;
  s << std::setprecision(prec) << v;
  return s.str();
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "gatecut_acceptance" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// ---- random tiny instances ----

struct Instance {
  NetworkSpec spec;
  WeightSet w;
  Matrix x, y;
  GateField base;  // free gates at 0, fixed multipliers as the model holds them
  std::vector<GateId> gates;
};

Instance random_instance(Rng& rng, std::size_t max_gates, bool smooth, bool allow_classification) {
  const Activation acts_smooth[] = {Activation::tanh, Activation::softplus};
  const Activation acts_any[] = {Activation::tanh, Activation::softplus, Activation::relu};
  for (;;) {
    Instance in;
    const bool cls = allow_classification && rng.bernoulli(0.3);
    in.spec.task = cls ? Task::classification : Task::regression;
    const std::size_t nb = 1 + rng.uniform_index(2);
    std::size_t width = 2 + rng.uniform_index(2);
    const std::size_t in_width = width;
    for (std::size_t l = 0; l < nb; ++l) {
      const bool last = l + 1 == nb;
      const std::size_t out = last ? (cls ? 3 : 1) : 2 + rng.uniform_index(2);
      const Activation a = smooth ? acts_smooth[rng.uniform_index(2)] : acts_any[rng.uniform_index(3)];
      GatePlan plan{rng.bernoulli(0.8), true, l > 0 && rng.bernoulli(0.5)};
      in.spec.blocks.push_back(dense_block(width, 1 + rng.uniform_index(3), out, a, plan));
      width = out;
    }
    GateState g = GateState::init(in.spec, 0.5);
    in.gates = g.free_gates();
    if (in.gates.empty() || in.gates.size() > max_gates) continue;
    in.base = g.theta();
    for (const GateId& id : in.gates) at(in.base, id) = 0.0;
    in.w = gatecut::testing::random_weights(in.spec, rng, 0.7);
    const std::size_t n = 6 + rng.uniform_index(6);
    in.x = gatecut::testing::random_matrix(n, in_width, rng);
    if (cls) {
      in.y = Matrix(n, 1);
      for (std::size_t r = 0; r < n; ++r) in.y(r, 0) = static_cast<double>(rng.uniform_index(3));
    } else {
      in.y = gatecut::testing::random_matrix(n, 1, rng);
    }
    return in;
  }
}

GateField field_of(const Instance& in, const std::vector<double>& th) {
  GateField f = in.base;
  for (std::size_t i = 0; i < in.gates.size(); ++i) at(f, in.gates[i]) = th[i];
  return f;
}

// Costs at every {0,1} assignment of the free gates; bit i of the index is gate i.
std::vector<double> vertex_costs(const Instance& in) {
  const std::size_t nv = std::size_t(1) << in.gates.size();
  std::vector<double> cost(nv);
  std::vector<double> th(in.gates.size());
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t i = 0; i < th.size(); ++i) th[i] = (v >> i) & 1u ? 1.0 : 0.0;
    cost[v] = loss(forward(in.spec, in.w, field_of(in, th), in.x).y, in.y, in.spec.task);
  }
  return cost;
}

// E_xi[C] under independent Bernoulli(theta_i) gates, by direct summation.
double enumerated_cost(const std::vector<double>& cost, const std::vector<double>& th) {
  double s = 0.0;
  for (std::size_t v = 0; v < cost.size(); ++v) {
    double p = 1.0;
    for (std::size_t i = 0; i < th.size(); ++i) p *= (v >> i) & 1u ? th[i] : 1.0 - th[i];
    s += p * cost[v];
  }
  return s;
}

// ---- criteria ----

// J(pi; theta) for the flattening hyper-prior.
double j_pi(double pi, double theta, double gamma) {
  return (1.0 - theta) * std::log((1.0 - theta) / (1.0 - pi)) + theta * std::log(theta / pi) +
         std::log(1.0 + (gamma - 1.0) * (1.0 - pi));
}

Outcome criterion1() {
  Rng rng(101);
  double worst_arg = 0.0, worst_val = 0.0, worst_beat = -std::numeric_limits<double>::infinity(), worst_pdf = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double theta = rng.uniform(0.01, 0.99);
    const double gamma = std::exp(rng.uniform(-6.0, -0.01));
    double best = std::numeric_limits<double>::infinity(), arg = 0.0;
    for (int i = 1; i < 1000; ++i) {
      const double p = i * 1e-3;
      const double j = j_pi(p, theta, gamma);
      if (j < best) best = j, arg = p;
    }
    const double ps = pi_star(theta, gamma), js = j_pi(ps, theta, gamma);
    worst_arg = std::max(worst_arg, std::abs(arg - ps));
    worst_val = std::max(worst_val, std::abs(js - j_flat(theta, gamma)));
    worst_beat = std::max(worst_beat, js - best);

    const int n = 20000;
    double s = flattening_pdf(0.0, gamma) + flattening_pdf(1.0, gamma);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * flattening_pdf(static_cast<double>(i) / n, gamma);
    worst_pdf = std::max(worst_pdf, std::abs(s / (3.0 * n) - 1.0));
  }
  // pi* can sit below the first grid point for small gamma*theta, so the grid
  // locates it to one spacing and the closed form must beat every grid value.
  const bool pass = worst_arg <= 1e-3 && worst_beat <= 1e-12 && worst_val <= 1e-10 && worst_pdf <= 1e-8;
  return {pass, "50 pairs: |grid argmin - pi*| " + num(worst_arg) + " (<= 1e-3), J(pi*) - grid min " +
                    num(worst_beat) + " (<= 1e-12), |J(pi*) - j_flat| " + num(worst_val) +
                    " (<= 1e-10), pdf integral error " + num(worst_pdf) + " (<= 1e-8)"};
}

Outcome criterion2() {
  Rng rng(202);
  double worst_gap = -std::numeric_limits<double>::infinity(), worst_mid = 0.0, worst_lib = 0.0;
  std::size_t max_gates = 0;
  bool pass = true;
  for (int k = 0; k < 20; ++k) {
    Instance in = random_instance(rng, kMaxVertexGates, false, true);
    max_gates = std::max(max_gates, in.gates.size());
    const ComplexityConsts consts = derive_consts(in.spec);
    const double nu = rng.uniform(0.0, 0.5), alpha = rng.uniform(), beta = rng.uniform(), lambda = 1e-3;
    const std::vector<double> cost = vertex_costs(in);
    const double wreg = 0.5 * lambda * in.w.squared_norm();
    auto L = [&](const std::vector<double>& th) {
      return enumerated_cost(cost, th) + wreg + nu * j_fp(field_of(in, th), consts, alpha, beta);
    };
    const std::size_t g = in.gates.size();
    std::vector<double> th(g);
    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < cost.size(); ++v) {
      for (std::size_t i = 0; i < g; ++i) th[i] = (v >> i) & 1u ? 1.0 : 0.0;
      vmin = std::min(vmin, L(th));
    }
    double imin = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 200; ++t) {
      for (double& v : th) v = rng.uniform();
      imin = std::min(imin, L(th));
      worst_lib = std::max(worst_lib, std::abs(enumerated_cost(cost, th) -
                                               expected_cost(in.spec, in.w, field_of(in, th), in.x, in.y)));
      if (t < 10) {
        for (std::size_t i = 0; i < g; ++i) {
          const double keep = th[i];
          th[i] = 0.0;
          const double l0 = L(th);
          th[i] = 1.0;
          const double l1 = L(th);
          th[i] = 0.5;
          const double lm = L(th);
          th[i] = keep;
          worst_mid = std::max(worst_mid, std::abs(lm - 0.5 * (l0 + l1)));
        }
      }
    }
    worst_gap = std::max(worst_gap, vmin - imin);
    pass = pass && vmin <= imin + 1e-9;
  }
  pass = pass && worst_mid <= 1e-10 && worst_lib <= 1e-10;
  return {pass, "20 instances (<= " + std::to_string(max_gates) + " gates): max(vertex min - interior min) " +
                    num(worst_gap) + " (<= 1e-9), midpoint residual " + num(worst_mid) +
                    " (<= 1e-10), library expected_cost vs enumeration " + num(worst_lib)};
}

std::vector<double> flat_weights(const WeightSet& w) {
  std::vector<double> v;
  for (const auto& b : w.blocks)
    for (const Matrix* m : {&b.w1, &b.w2, &b.w3}) v.insert(v.end(), m->values().begin(), m->values().end());
  return v;
}

void set_weight(WeightSet& w, std::size_t k, double value) {
  for (auto& b : w.blocks)
    for (Matrix* m : {&b.w1, &b.w2, &b.w3}) {
      if (k < m->size()) {
        m->values()[k] = value;
        return;
      }
      k -= m->size();
    }
}

Outcome criterion3() {
  Rng rng(303);
  double worst_w = 0.0, worst_theta = 0.0, worst_jfp = 0.0;
  for (int k = 0; k < 10; ++k) {
    Instance in = random_instance(rng, 12, true, true);
    GateField xi = field_of(in, std::vector<double>(in.gates.size(), 0.0));
    for (const GateId& id : in.gates) at(xi, id) = rng.uniform(0.2, 1.0);
    Gradients g = backward(in.spec, in.w, forward(in.spec, in.w, xi, in.x), in.y);
    const std::vector<double> analytic = flat_weights(g.dw), w0 = flat_weights(in.w);
    const double h = 1e-5;
    for (std::size_t i = 0; i < w0.size(); ++i) {
      WeightSet w = in.w;
      set_weight(w, i, w0[i] + h);
      const double lp = loss(forward(in.spec, w, xi, in.x).y, in.y, in.spec.task);
      set_weight(w, i, w0[i] - h);
      const double lm = loss(forward(in.spec, w, xi, in.x).y, in.y, in.spec.task);
      const double fd = (lp - lm) / (2.0 * h);
      worst_w = std::max(worst_w, std::abs(analytic[i] - fd) / std::max({std::abs(fd), std::abs(analytic[i]), 1e-4}));
    }

    // Exact gate gradients: the enumerated cost is multilinear, so central
    // differences are exact up to rounding.
    const std::vector<double> cost = vertex_costs(in);
    std::vector<double> th(in.gates.size());
    for (double& v : th) v = rng.uniform(0.1, 0.9);
    const GateField theta = field_of(in, th);
    const ComplexityConsts consts = derive_consts(in.spec);
    const double alpha = rng.uniform(), beta = rng.uniform();
    const GateField gj = grad_jfp(theta, consts, alpha, beta);
    const double ht = 1e-3;
    for (std::size_t i = 0; i < th.size(); ++i) {
      std::vector<double> tp = th, tm = th;
      tp[i] += ht;
      tm[i] -= ht;
      const double fd = (enumerated_cost(cost, tp) - enumerated_cost(cost, tm)) / (2.0 * ht);
      worst_theta = std::max(worst_theta,
                             std::abs(theta_grad_exact(in.spec, in.w, theta, in.x, in.y, in.gates[i]) - fd));
      const double fdj = (j_fp(field_of(in, tp), consts, alpha, beta) - j_fp(field_of(in, tm), consts, alpha, beta)) /
                         (2.0 * ht);
      worst_jfp = std::max(worst_jfp, std::abs(at(gj, in.gates[i]) - fdj));
    }
  }
  const bool pass = worst_w <= 1e-5 && worst_theta <= 1e-9 && worst_jfp <= 1e-8;
  return {pass, "10 nets: weight grad rel err " + num(worst_w) + " (<= 1e-5), exact theta grad err " +
                    num(worst_theta) + " (<= 1e-9), grad_jfp err " + num(worst_jfp) + " (<= 1e-8)"};
}

Outcome criterion4() {
  Rng rng(404);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    MlpShape s;
    s.in = 2 + rng.uniform_index(6);
    s.width = 2 + rng.uniform_index(8);
    s.units = 1 + rng.uniform_index(8);
    s.blocks = 1 + rng.uniform_index(5);
    s.out = 1 + rng.uniform_index(3);
    s.input_gates = rng.bernoulli(0.5);
    const NetworkSpec spec = residual_mlp(s);
    const ComplexityConsts c = derive_consts(spec);
    GateState gs = GateState::init(spec, 1.0);
    GateField t = gs.theta();
    for (const GateId& id : gs.free_gates()) at(t, id) = rng.uniform();
    const double nu = rng.uniform(0.01, 2.0), alpha = rng.uniform(), beta = rng.uniform();
    const double n = static_cast<double>(1 + rng.uniform_index(100000));
    const GammaSchedule g = gamma_schedule(t, c, nu, alpha, beta, n);
    double s_log = 0.0;
    for (std::size_t l = 0; l < spec.blocks.size(); ++l) {
      s_log += t.block[l] * g.log_gamma_b[l];
      for (double v : t.unit[l]) s_log += v * g.log_gamma_1[l];
      for (double v : t.input[l]) s_log += v * g.log_gamma_2[l];
    }
    const double lhs = nu * j_fp(t, c, alpha, beta), rhs = -s_log / n;
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300));
  }
  return {worst <= 1e-10, "50 draws: max rel err " + num(worst) + " (<= 1e-10)"};
}

Outcome criterion5() {
  const NetworkSpec r50 = read_arch(std::string(GATECUT_SOURCE_DIR) + "/data/architectures/resnet50.arch");
  const ComplexityReport rep = analyze_static(r50);
  const double p_err = std::abs(rep.params - 25.56e6) / 25.56e6;
  const double f_err = std::abs(rep.flops - 3.72e9) / 3.72e9;
  Rng rng(505);
  std::size_t mismatches = 0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t in = 1 + rng.uniform_index(64), kk = 1 + rng.uniform_index(64), out = 1 + rng.uniform_index(64);
    const double hand = static_cast<double>(kk * in + kk + out * kk + out * in);
    NetworkSpec s;
    s.blocks.push_back(dense_block(in, kk, out));
    const ComplexityReport r = analyze_static(s);
    if (r.params != hand || r.flops != hand) ++mismatches;
  }
  const bool pass = p_err <= 0.02 && f_err <= 0.10 && mismatches == 0;
  return {pass, "ResNet50 params " + num(rep.params, 9) + " (" + num(100 * p_err, 3) + "% off, <= 2%), FLOPS " +
                    num(rep.flops, 6) + " (" + num(100 * f_err, 3) + "% off, <= 10%); toy blocks " +
                    std::to_string(20 - mismatches) + "/20 exact"};
}

Outcome criterion6() {
  const std::uint64_t seed = 1;
  HostShape shape;  // 2 softplus units
  Host host = default_host(shape, seed);
  Rng est = Rng(seed).split(10);
  const double w_max = 1.0;
  EtaKappa ek = estimate_eta_kappa(host, 2000, w_max, est);
  StabilityConsts sc = stability_consts(host, ek);
  CertifyOptions co;
  co.integ.method = Method::rk4;
  co.integ.dt = 1e-3;
  co.integ.t_end = 200.0 / shape.lambda;
  co.tol = 1e-3;
  co.slack_c = 1.0;

  std::ostringstream d;
  bool pass = true;
  for (Region reg : {Region::block, Region::unit}) {
    SweepResult r =
        certify_sweep(host, sc, reg, 0, 100, w_max, Rng(seed).split(reg == Region::block ? 20 : 21).seed(), co);
    double rise = 0.0, slack = 0.0, tw = 0.0;
    for (const Certificate& c : r.certs) {
      rise = std::max(rise, c.max_increase);
      slack = std::max(slack, c.slack);
      tw = std::max(tw, c.terminal_w);
    }
    pass = pass && r.passed == 100;
    d << (reg == Region::block ? "D_B " : "D_U ") << r.passed << "/100 (max one-step rise " << num(rise)
      << ", slack " << num(slack) << ", max terminal |W| " << num(tw) << "); ";
  }
  SubsystemState s = state_from_host(host, 0.0, 0.5);
  s.w1.fill(0.0);
  s.w2.fill(0.0);
  IntegrateOptions io = co.integ;
  io.t_end = 1.0;
  Trajectory tr = integrate(host, s, io);
  const double dev = std::max({norm_w1(tr.final_state), norm_w2(tr.final_state), tr.final_state.theta_b});
  pass = pass && dev <= 1e-12;
  d << "E_B drift " << num(dev) << " (<= 1e-12); radius " << num(sc.radius);
  return {pass, d.str()};
}

// ---- desk-scale training (criteria 7, 8, 10) ----

cli::Config desk_config(std::uint64_t seed) {
  cli::Config c = cli::Config::defaults();
  c.set("run.seed", std::to_string(seed));
  c.set("run.plots", "false");
  c.set("data.n", "10000");
  c.set("data.teacher_width", "16");
  c.set("data.teacher_units", "16");
  c.set("data.teacher_blocks", "2");
  c.set("data.teacher_act", "relu");
  c.set("model.width", "32");
  c.set("model.units", "32");
  c.set("model.blocks", "8");
  c.set("model.act", "relu");
  c.set("trainer.epochs", "10");
  c.set("trainer.batch", "128");
  c.set("trainer.theta_lr", "0.02");
  c.set("trainer.lr", "0.05");
  return c;
}

struct DeskRun {
  double fpr = 0.0, ppr = 0.0;
  std::size_t layers = 0;
};

struct CompactionLog {
  std::size_t checks = 0;
  std::size_t events = 0;
  double worst = 0.0;
  bool finite = true;
};

CompactionLog g_compaction;
std::vector<std::string> g_desk_lines;

// Masked vs compacted outputs on 100 inputs drawn independently of the trainer.
void check_compaction(const TrainState& st, Rng& rng) {
  CompactNet c = compact(st.spec, st.weights, st.gates);
  Matrix x(100, st.spec.input_width());
  for (double& v : x.values()) v = rng.uniform(-3.0, 3.0);
  const Matrix a = forward(st.spec, st.weights, st.gates.theta(), x).y;
  const Matrix b = forward(c.spec, c.weights, c.gates.theta(), x).y;
  const double d = max_abs_diff(a, b);
  ++g_compaction.checks;
  if (!std::isfinite(d)) g_compaction.finite = false;
  else g_compaction.worst = std::max(g_compaction.worst, d);
}

std::map<std::tuple<std::uint64_t, double, double, double>, DeskRun> g_desk_cache;

DeskRun desk_run(std::uint64_t seed, double nu, double alpha, double beta) {
  const auto key = std::make_tuple(seed, nu, alpha, beta);
  if (auto it = g_desk_cache.find(key); it != g_desk_cache.end()) return it->second;
  cli::Config cfg = desk_config(seed);
  cfg.set("trainer.nu", num(nu, 17));
  cfg.set("trainer.alpha", num(alpha, 17));
  cfg.set("trainer.beta", num(beta, 17));
  const Dataset data = cli::make_dataset(cfg);
  const NetworkSpec spec = cli::make_spec(cfg, data);
  Hyperparams hp = cli::make_hyper(cfg);
  hp.check_inputs = 100;
  Trainer tr(spec, data, hp);
  Rng probe(seed * 7919 + 17);
  tr.run([&](const MetricsRecord& m, const std::vector<PruneEvent>& ev) {
    g_compaction.events += ev.size();
    if (!std::isfinite(m.compact_diff)) g_compaction.finite = false;
    else g_compaction.worst = std::max(g_compaction.worst, m.compact_diff);
    check_compaction(tr.state(), probe);
  });
  const MetricsRecord& last = tr.state().history.back();
  g_desk_lines.push_back("  seed " + std::to_string(seed) + " nu " + num(nu) + " alpha " + num(alpha) + " beta " +
                         num(beta) + ": fPR " + num(last.fpr) + " pPR " + num(last.ppr) + " layers " +
                         std::to_string(last.layers_left) + " test loss " + num(last.test_loss));
  return g_desk_cache[key] = {last.fpr, last.ppr, last.layers_left};
}

bool g_desk_done = false;
Outcome g_c8;

void run_desk() {
  if (g_desk_done) return;
  g_desk_done = true;
  const std::vector<std::uint64_t> seeds = {1, 2, 3};
  const std::vector<double> nus = {0.0, 0.002, 0.005};
  const double matched = nus[1];
  std::vector<double> fpr_med, ppr_med;
  for (double nu : nus) {
    std::vector<double> f, p;
    for (auto s : seeds) {
      DeskRun r = desk_run(s, nu, 0.0, 0.5);
      f.push_back(r.fpr);
      p.push_back(r.ppr);
    }
    fpr_med.push_back(median(f));
    ppr_med.push_back(median(p));
  }
  const bool nu_ok = fpr_med[0] <= fpr_med[1] && fpr_med[1] <= fpr_med[2] && ppr_med[0] <= ppr_med[1] &&
                     ppr_med[1] <= ppr_med[2];

  std::vector<double> lay0, lay5;
  for (auto s : seeds) {
    lay0.push_back(static_cast<double>(desk_run(s, matched, 0.0, 0.5).layers));
    lay5.push_back(static_cast<double>(desk_run(s, matched, 0.5, 0.5).layers));
  }
  const bool alpha_ok = median(lay5) <= median(lay0);

  std::vector<double> f1, p1, f0, p0;
  for (auto s : seeds) {
    DeskRun b1 = desk_run(s, matched, 0.0, 1.0);
    DeskRun b0 = desk_run(s, matched, 0.0, 0.0);
    f1.push_back(b1.fpr);
    p1.push_back(b1.ppr);
    f0.push_back(b0.fpr);
    p0.push_back(b0.ppr);
  }
  const bool beta_ok = median(f1) >= median(p1) && median(f0) <= median(p0);
  const bool beta_strict = median(f1) > median(p1) || median(f0) < median(p0);

  std::ostringstream d;
  d << "runs shared with criterion 7; nu {0, 0.002, 0.005} median fPR " << num(fpr_med[0]) << " / " << num(fpr_med[1]) << " / "
    << num(fpr_med[2]) << ", pPR " << num(ppr_med[0]) << " / " << num(ppr_med[1]) << " / " << num(ppr_med[2])
    << (nu_ok ? " nondecreasing" : " NOT nondecreasing") << "; layers at nu " << matched << ": alpha 0 -> "
    << median(lay0) << ", alpha 0.5 -> " << median(lay5) << "; beta=1 fPR " << num(median(f1)) << " vs pPR "
    << num(median(p1)) << ", beta=0 fPR " << num(median(f0)) << " vs pPR " << num(median(p0))
    << (beta_strict ? "" : " (equal: dense blocks cost the same in FLOPS and parameters)");
  g_c8 = {nu_ok && alpha_ok && beta_ok, d.str()};
}

Outcome criterion7() {
  run_desk();
  const bool pass = g_compaction.finite && g_compaction.worst <= 1e-6 && g_compaction.events > 0;
  return {pass, std::to_string(g_compaction.checks) + " epoch checks over " + std::to_string(g_desk_cache.size()) + " runs with " +
                    std::to_string(g_compaction.events) + " prune events: max |masked - compacted| " +
                    num(g_compaction.worst) + " (<= 1e-6)"};
}

Outcome criterion8() {
  run_desk();
  return g_c8;
}

std::string mnist_dir() {
  if (const char* env = std::getenv("GATECUT_MNIST_DIR")) return env;
  return "/root/data/mnist";
}

int quiet_train(const cli::Config& cfg) {
  std::ostringstream log, err;
  cli::RunOptions opt{"train"};
  opt.quiet = true;
  int code = cli::run(cfg, opt, log, err);
  if (code != cli::kOk) std::cerr << err.str();
  return code;
}

double last_metric(const fs::path& csv, const std::string& column) {
  std::ifstream f(csv);
  std::string line, head, last;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (head.empty()) head = line;
    else last = line;
  }
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  auto h = split(head), r = split(last);
  for (std::size_t i = 0; i < h.size() && i < r.size(); ++i)
    if (h[i] == column) return std::stod(r[i]);
  return std::numeric_limits<double>::quiet_NaN();
}

Outcome criterion9() {
  const std::string dir = mnist_dir();
  if (!fs::exists(fs::path(dir) / "train-images-idx3-ubyte"))
    return {false, "MNIST files not found in " + dir + " (set GATECUT_MNIST_DIR)"};
  cli::Config base = cli::Config::read(std::string(GATECUT_SOURCE_DIR) + "/configs/mnist.ini");
  base.set("data.mnist_dir", dir);
  base.set("run.plots", "false");
  const std::string nu = base.get("trainer", "nu");

  cli::Config b = base, p = base;
  const fs::path out_b = scratch("mnist_baseline"), out_p = scratch("mnist_pruned");
  b.set("trainer.nu", "0");
  b.set("run.out", out_b.string());
  p.set("run.out", out_p.string());
  if (quiet_train(b) != cli::kOk || quiet_train(p) != cli::kOk) return {false, "training run failed"};
  const double acc_b = 100 * last_metric(out_b / "metrics.csv", "test_acc");
  const double acc_p = 100 * last_metric(out_p / "metrics.csv", "test_acc");
  const double ppr = last_metric(out_p / "metrics.csv", "ppr");
  const bool pass = acc_b >= 95.0 && ppr >= 30.0 && acc_b - acc_p <= 2.0;
  return {pass, "baseline test acc " + num(acc_b) + "% (>= 95); nu " + nu + ": pPR " + num(ppr) +
                    "% (>= 30), test acc " + num(acc_p) + "% (drop " + num(acc_b - acc_p) + ", <= 2)"};
}

Outcome criterion10() {
  cli::Config cfg = desk_config(4);
  cfg.set("trainer.nu", "0.005");
  cfg.set("trainer.alpha", "0.5");
  const fs::path a = scratch("determinism_a"), b = scratch("determinism_b");
  cli::Config ca = cfg, cb = cfg;
  ca.set("run.out", a.string());
  cb.set("run.out", b.string());
  if (quiet_train(ca) != cli::kOk || quiet_train(cb) != cli::kOk) return {false, "training run failed"};
  const std::string ma = slurp(a / "metrics.csv"), mb = slurp(b / "metrics.csv");
  const std::string ea = slurp(a / "prune_events.log"), eb = slurp(b / "prune_events.log");
  const bool pass = !ma.empty() && ma == mb && ea == eb;
  return {pass, "metrics.csv " + std::to_string(ma.size()) + " bytes " + (ma == mb ? "identical" : "DIFFER") +
                    ", prune_events.log " + (ea == eb ? "identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form gate math", criterion1},
      {"vertex optimality of the gate objective", criterion2},
      {"gradient correctness", criterion3},
      {"gamma schedule identity", criterion4},
      {"complexity accounting", criterion5},
      {"Lyapunov certification", criterion6},
      {"pruning equivalence", criterion7},
      {"directional hyperparameter behavior", criterion8},
      {"MNIST end-to-end quality", criterion9},
      {"determinism", criterion10},
  };
  std::set<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    const long k = std::strtol(argv[i], nullptr, 10);
    if (k < 1 || k > static_cast<long>(criteria.size())) {
      std::cerr << "usage: acceptance [criterion numbers 1-" << criteria.size() << "]\n";
      return 2;
    }
    selected.insert(static_cast<std::size_t>(k));
  }
  bool all = true;
  for (std::size_t k = 1; k <= criteria.size(); ++k) {
    if (!selected.empty() && !selected.count(k)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && o.pass;
    std::cout << "criterion " << k << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[k - 1].first << ": "
              << o.detail << " [" << num(secs, 3) << " s]" << std::endl;
    if (k == 8 && !g_desk_lines.empty())
      for (const auto& l : g_desk_lines) std::cout << l << "\n";
  }
  return all ? 0 : 1;
}

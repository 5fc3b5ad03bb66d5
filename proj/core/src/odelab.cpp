// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include "gatecut/odelab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gatecut/data.hpp"
#include "gatecut/error.hpp"
#include "gatecut/parallel.hpp"

namespace gatecut {

Host make_host(const NetworkSpec& spec, const WeightSet& w, const GateField& base, const Matrix& x,
               const Matrix& y, std::size_t block, const Objective& obj) {
  validate(spec);
  check_shapes(spec, w);
  check_shapes(spec, base);
  if (block >= spec.blocks.size()) throw DomainError("host block index out of range");
  const BlockSpec& b = spec.blocks[block];
  if (b.path != PathKind::active || !b.gates.block || !b.gates.unit)
    throw DomainError("host block needs an active path with block and unit gates");
  if (b.hidden.size() != 1) throw DomainError("host block must have a single hidden layer");
  if (b.units() > kMaxVertexGates)
    throw LimitError("host block has " + std::to_string(b.units()) + " units, limit " +
                     std::to_string(kMaxVertexGates));
  if (x.rows() != y.rows() || x.cols() != spec.input_width()) throw ShapeError("host data shape mismatch");
  if (!(obj.nu > 0.0) || obj.alpha < 0.0 || obj.beta < 0.0 || obj.beta > 1.0 || !(obj.lambda > 0.0))
    throw DomainError("host objective needs nu > 0, alpha >= 0, beta in [0,1], lambda > 0");
  GateField probe = base;
  probe.block[block] = 0.0;
  std::fill(probe.unit[block].begin(), probe.unit[block].end(), 0.0);
  for (double v : probe.flatten())
    if (v != 0.0 && v != 1.0) throw DomainError("host gates outside the subsystem must be 0 or 1");
  Host h;
  h.spec = spec;
  h.weights = w;
  h.base = base;
  h.x = x;
  h.y = y;
  h.block = block;
  h.obj = obj;
  h.consts = derive_consts(spec);
  return h;
}

Host default_host(const HostShape& shape, std::uint64_t seed) {
  NetworkSpec spec;
  spec.task = Task::regression;
  BlockSpec b;
  b.name = "host";
  b.in = shape.in;
  b.hidden = {shape.units};
  b.out = shape.out;
  b.act = shape.act;
  b.skip = SkipKind::dense;
  b.path = PathKind::active;
  b.gates = {true, true, false};
  spec.blocks.push_back(b);
  validate(spec);
  Rng root(seed);
  Rng data_rng = root.split(1);
  Dataset d = gen_teacher_student(spec, shape.samples, 0.0, data_rng);
  Rng init = root.split(2);
  WeightSet w = init_weights(spec, init);
  return make_host(spec, w, GateField::ones(spec), d.x, d.y, 0,
                   {shape.nu, shape.alpha, shape.beta, shape.lambda});
}

SubsystemState state_from_host(const Host& h, double theta_b, double theta1) {
  SubsystemState s;
  s.w1 = h.weights.blocks[h.block].w1;
  s.w2 = h.weights.blocks[h.block].w2;
  s.theta1.assign(s.w1.rows(), theta1);
  s.theta_b = theta_b;
  return s;
}

double norm_w1(const SubsystemState& s) { return std::sqrt(frobenius_sq(s.w1)); }
double norm_w2(const SubsystemState& s) { return std::sqrt(frobenius_sq(s.w2)); }

namespace {

double row_sq(const Matrix& m, std::size_t r) {
  double a = 0.0;
  for (std::size_t c = 0; c < m.cols(); ++c) a += m(r, c) * m(r, c);
  return a;
}

double col_sq(const Matrix& m, std::size_t c) {
  double a = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) a += m(r, c) * m(r, c);
  return a;
}

double l1(const std::vector<double>& v) {
  double a = 0.0;
  for (double x : v) a += std::abs(x);
  return a;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Projected derivative: an outward push at a bound is cancelled.
double project(double theta, double v) {
  if (theta <= 0.0 && v < 0.0) return 0.0;
  if (theta >= 1.0 && v > 0.0) return 0.0;
  return v;
}

}  // namespace

double unit_norm(const SubsystemState& s, std::size_t i) {
  return std::sqrt(row_sq(s.w1, i)) + std::sqrt(col_sq(s.w2, i));
}

Conditionals conditionals(const Host& h, const SubsystemState& s) {
  const std::size_t l = h.block;
  const std::size_t k = s.theta1.size();
  WeightSet w = h.weights;
  w.blocks[l].w1 = s.w1;
  w.blocks[l].w2 = s.w2;
  GateField xi = h.base;
  Conditionals c;
  c.cu1.assign(k, 0.0);
  c.cu0.assign(k, 0.0);
  c.gw1 = Matrix(s.w1.rows(), s.w1.cols());
  c.gw2 = Matrix(s.w2.rows(), s.w2.cols());

  xi.block[l] = 0.0;
  std::fill(xi.unit[l].begin(), xi.unit[l].end(), 0.0);
  c.c0 = vertex_cost(h.spec, w, xi, h.x, h.y);

  xi.block[l] = 1.0;
  const std::size_t nv = std::size_t(1) << k;
  std::vector<double> p_other(k);
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t i = 0; i < k; ++i) xi.unit[l][i] = (v >> i) & 1u ? 1.0 : 0.0;
    ForwardTrace tr = forward(h.spec, w, xi, h.x);
    const double cost = loss(tr.y, h.y, h.spec.task);
    double p = 1.0;
    for (std::size_t i = 0; i < k; ++i) p *= (v >> i) & 1u ? s.theta1[i] : 1.0 - s.theta1[i];
    c.c1 += p * cost;
    for (std::size_t i = 0; i < k; ++i) {
      double q = 1.0;
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) q *= (v >> j) & 1u ? s.theta1[j] : 1.0 - s.theta1[j];
      p_other[i] = q;
      ((v >> i) & 1u ? c.cu1[i] : c.cu0[i]) += q * cost;
    }
    if (v == 0) continue;  // no unit on: the path output and its gradients are zero
    Gradients g = backward(h.spec, w, tr, h.y);
    const Matrix& g1 = g.dw.blocks[l].w1;
    const Matrix& g2 = g.dw.blocks[l].w2;
    for (std::size_t i = 0; i < k; ++i) {
      if (!((v >> i) & 1u)) continue;
      const double q = p_other[i];
      for (std::size_t col = 0; col < g1.cols(); ++col) c.gw1(i, col) += q * g1(i, col);
      for (std::size_t row = 0; row < g2.rows(); ++row) c.gw2(row, i) += q * g2(row, i);
    }
  }
  return c;
}

double host_r(const Host& h) { return cross_term(h.base, h.consts, h.block, h.obj.nu, h.obj.beta); }
double host_r_floor(const Host& h) { return cross_term_floor(h.consts, h.block, h.obj.nu, h.obj.beta); }

SubsystemState rhs(const Host& h, const SubsystemState& s) {
  const Conditionals c = conditionals(h, s);
  const double r = host_r(h);
  const double lam = h.obj.lambda;
  const double na = h.obj.nu * h.obj.alpha / static_cast<double>(std::max<std::size_t>(h.consts.L, 1));
  SubsystemState d;
  d.w1 = Matrix(s.w1.rows(), s.w1.cols());
  d.w2 = Matrix(s.w2.rows(), s.w2.cols());
  d.theta1.assign(s.theta1.size(), 0.0);
  for (std::size_t i = 0; i < s.theta1.size(); ++i) {
    const double f = s.theta_b * s.theta1[i];
    for (std::size_t col = 0; col < s.w1.cols(); ++col) d.w1(i, col) = -f * c.gw1(i, col) - lam * s.w1(i, col);
    for (std::size_t row = 0; row < s.w2.rows(); ++row) d.w2(row, i) = -f * c.gw2(row, i) - lam * s.w2(row, i);
    d.theta1[i] = project(s.theta1[i], -s.theta_b * (c.cu1[i] - c.cu0[i] + r));
  }
  d.theta_b = project(s.theta_b, -(c.c1 - c.c0 + l1(s.theta1) * r) - na);
  return d;
}

void accumulate_eta_kappa(const Host& h, const SubsystemState& s, EtaKappa& ek) {
  const Conditionals c = conditionals(h, s);
  bool used = false;
  for (std::size_t i = 0; i < s.theta1.size(); ++i) {
    double n1 = std::sqrt(row_sq(s.w1, i));
    double n2 = std::sqrt(col_sq(s.w2, i));
    if (n1 > 0.0) {
      double dot = 0.0;
      for (std::size_t col = 0; col < s.w1.cols(); ++col) dot += s.w1(i, col) * c.gw1(i, col);
      double r = std::abs(dot) / n1;
      if (r > ek.eta) {
        ek.eta = r;
        ek.eta_at = s;
      }
      used = true;
    }
    if (n2 > 0.0) {
      double dot = 0.0;
      for (std::size_t row = 0; row < s.w2.rows(); ++row) dot += s.w2(row, i) * c.gw2(row, i);
      double r = std::abs(dot) / n2;
      if (r > ek.eta) {
        ek.eta = r;
        ek.eta_at = s;
      }
      used = true;
    }
    if (n1 + n2 > 0.0) {
      double r = std::abs(c.cu1[i] - c.cu0[i]) / (n1 + n2);
      if (r > ek.kappa) {
        ek.kappa = r;
        ek.kappa_at = s;
      }
    }
  }
  if (used)
    ++ek.draws;
  else
    ++ek.skipped;
}

EtaKappa estimate_eta_kappa(const Host& h, std::size_t samples, double w_max, Rng& rng) {
  if (!(w_max > 0.0)) throw DomainError("w_max must be positive");
  EtaKappa ek;
  SubsystemState s = state_from_host(h, 1.0, 1.0);
  for (std::size_t n = 0; n < samples; ++n) {
    double sq = 0.0;
    for (auto* m : {&s.w1, &s.w2})
      for (double& v : m->values()) {
        v = rng.normal();
        sq += v * v;
      }
    const double scale = w_max * std::pow(10.0, -3.0 * rng.uniform()) / std::sqrt(sq);
    for (double& v : s.w1.values()) v *= scale;
    for (double& v : s.w2.values()) v *= scale;
    for (double& t : s.theta1) t = rng.uniform();
    s.theta_b = rng.uniform();
    accumulate_eta_kappa(h, s, ek);
  }
  return ek;
}

StabilityConsts stability_consts(const Host& h, const EtaKappa& ek) {
  StabilityConsts c;
  c.r = host_r(h);
  c.r_m = host_r_floor(h);
  c.eta = ek.eta;
  c.kappa = ek.kappa;
  if (!(c.eta + c.kappa > 0.0)) throw DomainError("eta + kappa must be positive");
  c.radius = c.r_m / (4.0 * (c.eta + c.kappa));
  c.threshold = 0.5 * c.radius * c.radius;
  return c;
}

double lyapunov_b(const SubsystemState& s) {
  return 0.5 * (frobenius_sq(s.w1) + frobenius_sq(s.w2) + s.theta_b * s.theta_b);
}

double lyapunov_u(const SubsystemState& s, std::size_t i) {
  if (i >= s.theta1.size()) throw DomainError("unit index out of range");
  return 0.5 * (row_sq(s.w1, i) + col_sq(s.w2, i) + s.theta1[i] * s.theta1[i]);
}

bool in_region(const SubsystemState& s, const StabilityConsts& c, Region which, std::size_t i) {
  const double v = which == Region::block ? lyapunov_b(s) : lyapunov_u(s, i);
  return v <= c.threshold;
}

SubsystemState sample_in_region(const Host& h, const StabilityConsts& c, Region which, std::size_t i, double w_max,
                                Rng& rng) {
  SubsystemState s = state_from_host(h, 0.0, 0.0);
  const std::size_t k = s.theta1.size();
  if (which == Region::unit && i >= k) throw DomainError("unit index out of range");
  const double target = std::sqrt(2.0 * c.threshold * rng.uniform());
  auto fill_dir = [&](std::vector<double*> coords, double norm) {
    double sq = 0.0;
    for (double* p : coords) {
      *p = rng.normal();
      sq += *p * *p;
    }
    const double scale = sq > 0.0 ? norm / std::sqrt(sq) : 0.0;
    for (double* p : coords) *p *= scale;
  };
  if (which == Region::block) {
    std::vector<double*> coords;
    for (double& v : s.w1.values()) coords.push_back(&v);
    for (double& v : s.w2.values()) coords.push_back(&v);
    coords.push_back(&s.theta_b);
    fill_dir(coords, target);
    s.theta_b = std::abs(s.theta_b);
    for (double& t : s.theta1) t = rng.uniform();
  } else {
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<double*> coords;
      for (std::size_t col = 0; col < s.w1.cols(); ++col) coords.push_back(&s.w1(j, col));
      for (std::size_t row = 0; row < s.w2.rows(); ++row) coords.push_back(&s.w2(row, j));
      if (j == i) {
        coords.push_back(&s.theta1[j]);
        fill_dir(coords, target);
        s.theta1[j] = std::abs(s.theta1[j]);
      } else {
        fill_dir(coords, w_max * rng.uniform());
        s.theta1[j] = rng.uniform();
      }
    }
    s.theta_b = rng.uniform();
  }
  return s;
}

Method parse_method(const std::string& s) {
  if (s == "euler") return Method::euler;
  if (s == "rk4") return Method::rk4;
  throw DomainError("unknown integrator '" + s + "' (euler|rk4)");
}

const char* to_string(Method m) { return m == Method::euler ? "euler" : "rk4"; }

namespace {

// out = s + a d, with theta clamped to [0,1]
SubsystemState advance(const SubsystemState& s, double a, const SubsystemState& d) {
  SubsystemState o = s;
  axpy(a, d.w1, o.w1);
  axpy(a, d.w2, o.w2);
  for (std::size_t i = 0; i < o.theta1.size(); ++i) o.theta1[i] = clamp01(o.theta1[i] + a * d.theta1[i]);
  o.theta_b = clamp01(o.theta_b + a * d.theta_b);
  return o;
}

SubsystemState combine(const SubsystemState& a, const SubsystemState& b, const SubsystemState& c,
                       const SubsystemState& d) {
  SubsystemState o = a;
  axpy(2.0, b.w1, o.w1);
  axpy(2.0, c.w1, o.w1);
  axpy(1.0, d.w1, o.w1);
  axpy(2.0, b.w2, o.w2);
  axpy(2.0, c.w2, o.w2);
  axpy(1.0, d.w2, o.w2);
  for (std::size_t i = 0; i < o.theta1.size(); ++i)
    o.theta1[i] += 2.0 * b.theta1[i] + 2.0 * c.theta1[i] + d.theta1[i];
  o.theta_b += 2.0 * b.theta_b + 2.0 * c.theta_b + d.theta_b;
  return o;
}

bool finite_state(const SubsystemState& s, double bound) {
  if (!all_finite(s.w1) || !all_finite(s.w2)) return false;
  return norm_w1(s) <= bound && norm_w2(s) <= bound;
}

TrajectoryPoint point(double t, const SubsystemState& s) {
  TrajectoryPoint p;
  p.t = t;
  p.lambda_b = lyapunov_b(s);
  for (std::size_t i = 0; i < s.theta1.size(); ++i) p.lambda_u.push_back(lyapunov_u(s, i));
  p.theta_b = s.theta_b;
  p.theta1 = s.theta1;
  p.norm_w1 = norm_w1(s);
  p.norm_w2 = norm_w2(s);
  return p;
}

}  // namespace

Trajectory integrate(const Host& h, const SubsystemState& s0, const IntegrateOptions& opt) {
  if (!(opt.dt > 0.0)) throw DomainError("dt must be positive");
  if (opt.t_end < 0.0) throw DomainError("t_end must be >= 0");
  Trajectory tr;
  SubsystemState s = advance(s0, 0.0, s0);
  const std::size_t k = s.theta1.size();
  tr.max_increase_u.assign(k, 0.0);
  tr.points.push_back(point(0.0, s));
  const std::size_t every = std::max<std::size_t>(opt.record_every, 1);
  const auto nsteps = static_cast<std::size_t>(std::ceil(opt.t_end / opt.dt - 1e-9));
  double lb = lyapunov_b(s);
  std::vector<double> lu(k);
  for (std::size_t i = 0; i < k; ++i) lu[i] = lyapunov_u(s, i);
  double t = 0.0;
  for (std::size_t n = 0; n < nsteps; ++n) {
    const double dt = std::min(opt.dt, opt.t_end - static_cast<double>(n) * opt.dt);
    if (opt.method == Method::euler) {
      s = advance(s, dt, rhs(h, s));
    } else {
      SubsystemState k1 = rhs(h, s);
      SubsystemState k2 = rhs(h, advance(s, 0.5 * dt, k1));
      SubsystemState k3 = rhs(h, advance(s, 0.5 * dt, k2));
      SubsystemState k4 = rhs(h, advance(s, dt, k3));
      s = advance(s, dt / 6.0, combine(k1, k2, k3, k4));
    }
    t = static_cast<double>(n) * opt.dt + dt;
    ++tr.steps;
    if (!finite_state(s, opt.blowup)) {
      tr.blew_up = true;
      break;
    }
    const double nb = lyapunov_b(s);
    tr.max_increase_b = std::max(tr.max_increase_b, nb - lb);
    lb = nb;
    for (std::size_t i = 0; i < k; ++i) {
      const double nu = lyapunov_u(s, i);
      tr.max_increase_u[i] = std::max(tr.max_increase_u[i], nu - lu[i]);
      lu[i] = nu;
    }
    const bool stop = opt.stop && opt.stop(s);
    if (tr.steps % every == 0 || stop || n + 1 == nsteps) tr.points.push_back(point(t, s));
    if (stop) {
      tr.stopped = true;
      break;
    }
  }
  tr.final_state = s;
  tr.t_final = t;
  return tr;
}

std::string trajectory_csv(const Trajectory& tr) {
  std::ostringstream o;
  o.precision(12);
  const std::size_t k = tr.points.empty() ? 0 : tr.points.front().theta1.size();
  o << "t,lambda_b";
  for (std::size_t i = 0; i < k; ++i) o << ",lambda_u" << i;
  o << ",theta_b";
  for (std::size_t i = 0; i < k; ++i) o << ",theta1_" << i;
  o << ",norm_w1,norm_w2\n";
  for (const auto& p : tr.points) {
    o << p.t << ',' << p.lambda_b;
    for (double v : p.lambda_u) o << ',' << v;
    o << ',' << p.theta_b;
    for (double v : p.theta1) o << ',' << v;
    o << ',' << p.norm_w1 << ',' << p.norm_w2 << '\n';
  }
  return o.str();
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::out_of_scope: return "OUT_OF_SCOPE";
  }
  return "?";
}

namespace {

struct Terminal {
  double w = 0.0;
  double theta_side = 0.0;  // |theta_1|_1 or theta_1i
};

Terminal terminal(const SubsystemState& s, Region which, std::size_t i) {
  if (which == Region::block) return {std::max(norm_w1(s), norm_w2(s)), l1(s.theta1)};
  return {std::max(std::sqrt(row_sq(s.w1, i)), std::sqrt(col_sq(s.w2, i))), s.theta1[i]};
}

}  // namespace

Certificate certify(const Host& h, const StabilityConsts& c, const SubsystemState& s0, Region which, std::size_t i,
                    const CertifyOptions& opt) {
  Certificate cert;
  cert.in_region = in_region(s0, c, which, i);
  IntegrateOptions io = opt.integ;
  const double tol = opt.tol;
  io.stop = [&](const SubsystemState& s) {
    Terminal t = terminal(s, which, i);
    return t.w <= tol && std::min(t.theta_side, s.theta_b) <= tol;
  };
  io.record_every = std::max<std::size_t>(io.record_every, 1);
  Trajectory tr = integrate(h, s0, io);
  cert.t_final = tr.t_final;
  cert.max_increase = which == Region::block ? tr.max_increase_b : tr.max_increase_u[i];
  cert.slack = opt.slack_c * io.dt * io.dt;
  cert.monotone = cert.max_increase <= cert.slack;
  Terminal t = terminal(tr.final_state, which, i);
  cert.terminal_w = t.w;
  cert.terminal_factor = std::min(t.theta_side, tr.final_state.theta_b);
  const bool tb = tr.final_state.theta_b <= tol;
  const bool t1 = t.theta_side <= tol;
  cert.vanished = tb && t1 ? "both" : tb ? "theta_b" : t1 ? "theta1" : "none";
  cert.converged = !tr.blew_up && t.w <= tol && cert.terminal_factor <= tol;
  if (tr.blew_up) cert.note = "trajectory blew up";
  if (!cert.in_region) {
    cert.verdict = Verdict::out_of_scope;
    if (cert.note.empty()) cert.note = cert.converged ? "outside region, converged anyway" : "outside region";
  } else {
    cert.verdict = cert.monotone && cert.converged ? Verdict::pass : Verdict::fail;
    if (!cert.monotone) cert.note = "Lyapunov value rose beyond slack";
    else if (!cert.converged && cert.note.empty()) cert.note = "did not reach the invariant set by t_end";
  }
  return cert;
}

SweepResult certify_sweep(const Host& h, const StabilityConsts& c, Region which, std::size_t i, std::size_t n,
                          double w_max, std::uint64_t seed, const CertifyOptions& opt) {
  SweepResult r;
  Rng root(seed);
  for (std::size_t k = 0; k < n; ++k) {
    Rng rk = root.split(k);
    r.starts.push_back(sample_in_region(h, c, which, i, w_max, rk));
  }
  r.certs.resize(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) r.certs[k] = certify(h, c, r.starts[k], which, i, opt);
  });
  for (const auto& cert : r.certs) {
    if (cert.verdict == Verdict::pass) ++r.passed;
    else if (cert.verdict == Verdict::fail) ++r.failed;
    else ++r.out_of_scope;
  }
  return r;
}

namespace {

double state_distance(const SubsystemState& a, const SubsystemState& b) {
  double sq = frobenius_sq(sub(a.w1, b.w1)) + frobenius_sq(sub(a.w2, b.w2));
  for (std::size_t i = 0; i < a.theta1.size(); ++i) sq += (a.theta1[i] - b.theta1[i]) * (a.theta1[i] - b.theta1[i]);
  sq += (a.theta_b - b.theta_b) * (a.theta_b - b.theta_b);
  return std::sqrt(sq);
}

}  // namespace

ConvergenceReport convergence_order(const Host& h, const SubsystemState& s0, Method m, double dt, double t_end) {
  ConvergenceReport rep;
  rep.method = m;
  std::vector<SubsystemState> ends;
  for (double d : {dt, dt / 2.0, dt / 4.0}) {
    IntegrateOptions io;
    io.dt = d;
    io.t_end = t_end;
    io.method = m;
    io.record_every = std::size_t(1) << 30;
    ends.push_back(integrate(h, s0, io).final_state);
    rep.dt.push_back(d);
  }
  rep.diff = {state_distance(ends[0], ends[1]), state_distance(ends[1], ends[2])};
  rep.order = rep.diff[1] > 0.0 ? std::log2(rep.diff[0] / rep.diff[1]) : 0.0;
  return rep;
}

}  // namespace gatecut

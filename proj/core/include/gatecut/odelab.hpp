// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gatecut/arch.hpp"
#include "gatecut/complexity.hpp"
#include "gatecut/enumerate.hpp"
#include "gatecut/gates.hpp"
#include "gatecut/matrix.hpp"
#include "gatecut/network.hpp"
#include "gatecut/rng.hpp"

namespace gatecut {

// Frozen context of the block subsystem: every weight and gate outside
// block `block`'s W1, W2, theta_B and theta_1 is fixed.
struct Host {
  NetworkSpec spec;
  WeightSet weights;
  GateField base;  // fixed multipliers for every other gate, each 0 or 1
  Matrix x;
  Matrix y;
  std::size_t block = 0;
  Objective obj;
  ComplexityConsts consts;
};

// Validates the host: the block must have an active gated path with unit
// gates, at most kMaxVertexGates units, and `base` must be binary.
Host make_host(const NetworkSpec& spec, const WeightSet& w, const GateField& base, const Matrix& x,
               const Matrix& y, std::size_t block, const Objective& obj);

struct HostShape {
  std::size_t in = 2;
  std::size_t units = 2;
  std::size_t out = 1;
  std::size_t samples = 16;
  Activation act = Activation::softplus;
  double nu = 1.0;
  double alpha = 1.0;
  double beta = 0.5;
  double lambda = 1.0;
};

// One block with a frozen dense skip, trained on teacher data from a
// network of the same shape.
Host default_host(const HostShape& shape, std::uint64_t seed);

struct SubsystemState {
  Matrix w1;  // K x (in+1): row i is w_1i
  Matrix w2;  // out x K: column i is w_2i
  std::vector<double> theta1;
  double theta_b = 0.0;
};

SubsystemState state_from_host(const Host& h, double theta_b, double theta1);
double norm_w1(const SubsystemState& s);
double norm_w2(const SubsystemState& s);
double unit_norm(const SubsystemState& s, std::size_t i);  // |w_1i| + |w_2i|

// Exact conditional costs by enumeration over the unit gates.
struct Conditionals {
  double c1 = 0.0;             // C^1
  double c0 = 0.0;             // C^0
  std::vector<double> cu1;     // C^1_{1i,1}
  std::vector<double> cu0;     // C^1_{1i,0}
  Matrix gw1;                  // row i: grad_{w_1i} C^1_{1i,1}
  Matrix gw2;                  // column i: grad_{w_2i} C^1_{1i,1}
};

Conditionals conditionals(const Host& h, const SubsystemState& s);

// nu d^2 J_FP / d theta_B d theta_1i at the host's fixed theta_2.
double host_r(const Host& h);
double host_r_floor(const Host& h);

// Time derivative of the subsystem. The projection terms keep theta in
// [0,1]: at a bound, a derivative pointing outward is cancelled.
SubsystemState rhs(const Host& h, const SubsystemState& s);

struct EtaKappa {
  double eta = 0.0;
  double kappa = 0.0;
  std::size_t draws = 0;    // draws that contributed a ratio
  std::size_t skipped = 0;  // zero-norm draws
  SubsystemState eta_at;
  SubsystemState kappa_at;
};

// Running maxima of |w^T grad C| / |w| and |C_1 - C_0| / (|w_1i| + |w_2i|)
// over `samples` random states. Weight norms are log-uniform over three
// decades below w_max; thetas are uniform.
EtaKappa estimate_eta_kappa(const Host& h, std::size_t samples, double w_max, Rng& rng);
// Adds one state's ratios to `ek`.
void accumulate_eta_kappa(const Host& h, const SubsystemState& s, EtaKappa& ek);

struct StabilityConsts {
  double r = 0.0;
  double r_m = 0.0;
  double eta = 0.0;
  double kappa = 0.0;
  double radius = 0.0;     // R_m / (4 (eta + kappa))
  double threshold = 0.0;  // 1/2 radius^2
};

StabilityConsts stability_consts(const Host& h, const EtaKappa& ek);

double lyapunov_b(const SubsystemState& s);
double lyapunov_u(const SubsystemState& s, std::size_t i);

enum class Region { block, unit };
bool in_region(const SubsystemState& s, const StabilityConsts& c, Region which, std::size_t i = 0);

// Random state with Lyapunov value uniform in [0, threshold]. The other
// coordinates (theta_1 for D_B; theta_B and the other units for D_U) are
// drawn with weight norms up to w_max.
SubsystemState sample_in_region(const Host& h, const StabilityConsts& c, Region which, std::size_t i, double w_max,
                                Rng& rng);

enum class Method { euler, rk4 };
Method parse_method(const std::string& s);
const char* to_string(Method m);

struct TrajectoryPoint {
  double t = 0.0;
  double lambda_b = 0.0;
  std::vector<double> lambda_u;
  double theta_b = 0.0;
  std::vector<double> theta1;
  double norm_w1 = 0.0;
  double norm_w2 = 0.0;
};

struct IntegrateOptions {
  double dt = 1e-3;
  double t_end = 200.0;
  Method method = Method::rk4;
  std::size_t record_every = 1;
  double blowup = 1e6;
  // Checked after every step; integration stops once it returns true.
  std::function<bool(const SubsystemState&)> stop;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  SubsystemState final_state;
  double t_final = 0.0;
  std::size_t steps = 0;
  bool blew_up = false;
  bool stopped = false;
  double max_increase_b = 0.0;               // largest one-step rise of Lambda_B
  std::vector<double> max_increase_u;        // per unit
};

Trajectory integrate(const Host& h, const SubsystemState& s0, const IntegrateOptions& opt);
std::string trajectory_csv(const Trajectory& tr);

enum class Verdict { pass, fail, out_of_scope };
const char* to_string(Verdict v);

struct Certificate {
  Verdict verdict = Verdict::fail;
  bool in_region = false;
  bool monotone = false;
  bool converged = false;
  double max_increase = 0.0;
  double slack = 0.0;         // allowed one-step rise, slack_c dt^2
  double terminal_w = 0.0;    // max(|W1|, |W2|) or max(|w_1i|, |w_2i|)
  double terminal_factor = 0.0;
  std::string vanished;       // "theta_b", "theta1" or "both"
  double t_final = 0.0;
  std::string note;
};

struct CertifyOptions {
  IntegrateOptions integ;
  double tol = 1e-3;
  double slack_c = 1.0;
};

Certificate certify(const Host& h, const StabilityConsts& c, const SubsystemState& s0, Region which, std::size_t i,
                    const CertifyOptions& opt);

struct SweepResult {
  std::vector<SubsystemState> starts;
  std::vector<Certificate> certs;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t out_of_scope = 0;
};

// `n` independent starts drawn inside the region, certified in parallel.
SweepResult certify_sweep(const Host& h, const StabilityConsts& c, Region which, std::size_t i, std::size_t n,
                          double w_max, std::uint64_t seed, const CertifyOptions& opt);

struct ConvergenceReport {
  Method method = Method::rk4;
  std::vector<double> dt;      // dt, dt/2, dt/4
  std::vector<double> diff;    // |x(dt) - x(dt/2)|, |x(dt/2) - x(dt/4)|
  double order = 0.0;          // log2(diff[0] / diff[1])
};

ConvergenceReport convergence_order(const Host& h, const SubsystemState& s0, Method m, double dt, double t_end);

}  // namespace gatecut

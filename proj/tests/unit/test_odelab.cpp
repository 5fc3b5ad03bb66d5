// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include <gtest/gtest.h>

#include <cmath>

#include "gatecut/complexity.hpp"
#include "gatecut/enumerate.hpp"
#include "gatecut/error.hpp"
#include "gatecut/odelab.hpp"
#include "test_util.hpp"

namespace gatecut {
namespace {

using testing::random_matrix;

Host small_host(std::uint64_t seed = 1) {
  HostShape shape;
  shape.units = 2;
  shape.samples = 12;
  return default_host(shape, seed);
}

SubsystemState zero_state(const Host& h) {
  SubsystemState s = state_from_host(h, 0.0, 0.0);
  s.w1 = Matrix(s.w1.rows(), s.w1.cols());
  s.w2 = Matrix(s.w2.rows(), s.w2.cols());
  return s;
}

// The full network, weights and theta field the subsystem state describes.
WeightSet weights_of(const Host& h, const SubsystemState& s) {
  WeightSet w = h.weights;
  w.blocks[h.block].w1 = s.w1;
  w.blocks[h.block].w2 = s.w2;
  return w;
}

GateField theta_of(const Host& h, const SubsystemState& s) {
  GateField t = h.base;
  t.block[h.block] = s.theta_b;
  t.unit[h.block] = s.theta1;
  return t;
}

double frob(const Matrix& m) {
  double s = 0.0;
  for (double v : m.values()) s += v * v;
  return std::sqrt(s);
}

// ---- right-hand side ----

TEST(Rhs, ClosedBlockIsPureDecayWithFrozenUnits) {
  Host h = small_host();
  SubsystemState s = state_from_host(h, 0.0, 0.6);
  SubsystemState d = rhs(h, s);
  for (std::size_t i = 0; i < s.w1.values().size(); ++i)
    EXPECT_EQ(d.w1.values()[i], -h.obj.lambda * s.w1.values()[i]);
  for (std::size_t i = 0; i < s.w2.values().size(); ++i)
    EXPECT_EQ(d.w2.values()[i], -h.obj.lambda * s.w2.values()[i]);
  for (double v : d.theta1) EXPECT_EQ(v, 0.0);
}

TEST(Rhs, LowerBoundHoldsWhenPushedOutward) {
  Host h = small_host();
  SubsystemState s = zero_state(h);
  // With W = 0 the path is silent, so C^1 = C^0 and theta_B feels only -nu alpha.
  SubsystemState d = rhs(h, s);
  EXPECT_EQ(d.theta_b, 0.0);
}

TEST(Rhs, UpperBoundHoldsWhenPushedOutward) {
  HostShape shape;
  shape.nu = 1e-6;
  shape.alpha = 0.0;
  Host h = default_host(shape, 3);
  // Teacher data from the same shape: the path reduces the cost, so theta_B
  // wants to grow past 1.
  SubsystemState s = state_from_host(h, 1.0, 1.0);
  const Conditionals c = conditionals(h, s);
  ASSERT_LT(c.c1 - c.c0, 0.0);
  EXPECT_EQ(rhs(h, s).theta_b, 0.0);
}

TEST(Rhs, InteriorThetaRatesMatchExactGradientPlusRegularizer) {
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    Host h = small_host(10 + t);
    SubsystemState s = state_from_host(h, rng.uniform(0.1, 0.9), 0.5);
    for (double& v : s.theta1) v = rng.uniform(0.1, 0.9);
    const WeightSet w = weights_of(h, s);
    const GateField theta = theta_of(h, s);
    const GateField reg = grad_jfp(theta, h.consts, h.obj.alpha, h.obj.beta);
    const SubsystemState d = rhs(h, s);
    const double gb = theta_grad_exact(h.spec, w, theta, h.x, h.y, {GateKind::block, h.block, 0});
    EXPECT_NEAR(d.theta_b, -(gb + h.obj.nu * reg.block[h.block]), 1e-10);
    for (std::size_t i = 0; i < s.theta1.size(); ++i) {
      const double gu = theta_grad_exact(h.spec, w, theta, h.x, h.y, {GateKind::unit, h.block, i});
      EXPECT_NEAR(d.theta1[i], -(gu + h.obj.nu * reg.unit[h.block][i]), 1e-10);
    }
  }
}

TEST(Rhs, CrossTermIsMixedPartialOfRegularizer) {
  Host h = small_host();
  // J_FP is multilinear, so a difference quotient in theta_B is exact.
  GateField lo = h.base, hi = h.base;
  lo.block[h.block] = 0.25;
  hi.block[h.block] = 0.75;
  const double d =
      (grad_jfp(hi, h.consts, h.obj.alpha, h.obj.beta).unit[h.block][0] -
       grad_jfp(lo, h.consts, h.obj.alpha, h.obj.beta).unit[h.block][0]) /
      0.5;
  EXPECT_NEAR(host_r(h), h.obj.nu * d, 1e-12);
  EXPECT_GE(host_r(h), host_r_floor(h) - 1e-15);
  EXPECT_GT(host_r_floor(h), 0.0);
}

TEST(Rhs, WeightRatesMatchFiniteDifferenceOfConditionalCost) {
  Host h = small_host(4);
  SubsystemState s = state_from_host(h, 0.7, 0.4);
  const Conditionals c = conditionals(h, s);
  const double eps = 1e-6;
  for (std::size_t col = 0; col < s.w1.cols(); ++col) {
    SubsystemState p = s, m = s;
    p.w1(0, col) += eps;
    m.w1(0, col) -= eps;
    const double fd = (conditionals(h, p).cu1[0] - conditionals(h, m).cu1[0]) / (2 * eps);
    EXPECT_NEAR(c.gw1(0, col), fd, 1e-7);
  }
}

// ---- integration ----

TEST(Integrate, ZeroStateIsEquilibrium) {
  Host h = small_host();
  IntegrateOptions opt;
  opt.dt = 0.01;
  opt.t_end = 2.0;
  Trajectory tr = integrate(h, zero_state(h), opt);
  EXPECT_EQ(frob(tr.final_state.w1), 0.0);
  EXPECT_EQ(frob(tr.final_state.w2), 0.0);
  EXPECT_EQ(tr.final_state.theta_b, 0.0);
  for (double v : tr.final_state.theta1) EXPECT_EQ(v, 0.0);
}

TEST(Integrate, ClosedBlockDecaysExponentially) {
  Host h = small_host();
  SubsystemState s = state_from_host(h, 0.0, 0.5);
  IntegrateOptions opt;
  opt.dt = 1e-2;
  opt.t_end = 1.5;
  Trajectory tr = integrate(h, s, opt);
  const double f = std::exp(-h.obj.lambda * tr.t_final);
  EXPECT_NEAR(tr.t_final, 1.5, 1e-9);
  EXPECT_NEAR(frob(tr.final_state.w1), frob(s.w1) * f, 1e-10);
  EXPECT_NEAR(frob(tr.final_state.w2), frob(s.w2) * f, 1e-10);
  EXPECT_EQ(tr.final_state.theta1, s.theta1);
}

TEST(Integrate, ThetaStaysInUnitInterval) {
  Host h = small_host(5);
  SubsystemState s = state_from_host(h, 0.99, 0.02);
  IntegrateOptions opt;
  opt.dt = 0.05;
  opt.t_end = 5.0;
  opt.method = Method::euler;
  Trajectory tr = integrate(h, s, opt);
  for (const auto& p : tr.points) {
    EXPECT_GE(p.theta_b, 0.0);
    EXPECT_LE(p.theta_b, 1.0);
    for (double v : p.theta1) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Integrate, BlowUpAbortsWithPartialTrajectory) {
  Host h = small_host();
  SubsystemState s = state_from_host(h, 0.5, 0.5);
  IntegrateOptions opt;
  opt.blowup = 1e-3;
  Trajectory tr = integrate(h, s, opt);
  EXPECT_TRUE(tr.blew_up);
  EXPECT_LT(tr.t_final, opt.t_end);
}

TEST(Integrate, EulerIsFirstOrder) {
  Host h = small_host();
  SubsystemState s = state_from_host(h, 0.9, 0.5);
  ConvergenceReport r = convergence_order(h, s, Method::euler, 0.01, 0.3);
  EXPECT_NEAR(r.order, 1.0, 0.15);
}

TEST(Integrate, Rk4IsFourthOrder) {
  Host h = small_host();
  SubsystemState s = state_from_host(h, 0.9, 0.5);
  ConvergenceReport r = convergence_order(h, s, Method::rk4, 0.05, 0.3);
  EXPECT_NEAR(r.order, 4.0, 0.4);
}

TEST(Integrate, InvariantSetIsKeptToMachinePrecision) {
  Host h = small_host();
  SubsystemState s = zero_state(h);
  s.theta1.assign(s.theta1.size(), 0.5);
  IntegrateOptions opt;
  opt.dt = 0.01;
  opt.t_end = 1.0;
  Trajectory tr = integrate(h, s, opt);
  for (const auto& p : tr.points) {
    EXPECT_LE(p.norm_w1, 1e-12);
    EXPECT_LE(p.norm_w2, 1e-12);
    EXPECT_LE(p.theta_b, 1e-12);
  }
}

// ---- Lyapunov functions and regions ----

TEST(Lyapunov, HandValues) {
  Host h = small_host();
  SubsystemState s = zero_state(h);
  EXPECT_EQ(lyapunov_b(s), 0.0);
  EXPECT_EQ(lyapunov_u(s, 0), 0.0);
  s.theta_b = 1.0;
  EXPECT_EQ(lyapunov_b(s), 0.5);
}

TEST(Lyapunov, QuadraticScaling) {
  Host h = small_host();
  SubsystemState s = state_from_host(h, 0.4, 0.3);
  SubsystemState c = s;
  const double k = 2.5;
  for (double& v : c.w1.values()) v *= k;
  for (double& v : c.w2.values()) v *= k;
  for (double& v : c.theta1) v *= k;
  c.theta_b *= k;
  EXPECT_NEAR(lyapunov_b(c), k * k * lyapunov_b(s), 1e-12);
  EXPECT_NEAR(lyapunov_u(c, 1), k * k * lyapunov_u(s, 1), 1e-12);
}

TEST(Lyapunov, UnitValueUsesOwnRowAndColumn) {
  Host h = small_host();
  SubsystemState s = state_from_host(h, 0.4, 0.3);
  double w = 0.0;
  for (std::size_t c = 0; c < s.w1.cols(); ++c) w += s.w1(1, c) * s.w1(1, c);
  for (std::size_t r = 0; r < s.w2.rows(); ++r) w += s.w2(r, 1) * s.w2(r, 1);
  EXPECT_NEAR(lyapunov_u(s, 1), 0.5 * (w + 0.09), 1e-15);
}

TEST(Region, BoundaryIsClosed) {
  Host h = small_host();
  SubsystemState s = state_from_host(h, 0.2, 0.1);
  StabilityConsts c;
  c.threshold = lyapunov_b(s);
  EXPECT_TRUE(in_region(s, c, Region::block));
  c.threshold = lyapunov_b(s) / 1.01;
  EXPECT_FALSE(in_region(s, c, Region::block));
  c.threshold = 1e-9;
  EXPECT_TRUE(in_region(zero_state(h), c, Region::block));
  EXPECT_TRUE(in_region(zero_state(h), c, Region::unit, 1));
}

TEST(Region, RadiusFormula) {
  Host h = small_host();
  EtaKappa ek;
  ek.eta = 0.3;
  ek.kappa = 0.2;
  StabilityConsts c = stability_consts(h, ek);
  EXPECT_NEAR(c.radius, c.r_m / (4.0 * 0.5), 1e-15);
  EXPECT_NEAR(c.threshold, 0.5 * c.radius * c.radius, 1e-15);
  EXPECT_GE(c.r, c.r_m);
}

TEST(Region, SampledStartsLieInside) {
  Host h = small_host();
  Rng rng(6);
  EtaKappa ek = estimate_eta_kappa(h, 200, 1.0, rng);
  StabilityConsts c = stability_consts(h, ek);
  for (int t = 0; t < 50; ++t) {
    EXPECT_TRUE(in_region(sample_in_region(h, c, Region::block, 0, 1.0, rng), c, Region::block));
    EXPECT_TRUE(in_region(sample_in_region(h, c, Region::unit, 1, 1.0, rng), c, Region::unit, 1));
  }
}

// ---- eta / kappa ----

TEST(EtaKappa, ZeroWeightDrawIsSkipped) {
  Host h = small_host();
  EtaKappa ek;
  accumulate_eta_kappa(h, zero_state(h), ek);
  EXPECT_EQ(ek.skipped, 1u);
  EXPECT_EQ(ek.draws, 0u);
  EXPECT_EQ(ek.eta, 0.0);
  EXPECT_EQ(ek.kappa, 0.0);
}

TEST(EtaKappa, RunningMaxIsNondecreasing) {
  Host h = small_host();
  Rng rng(7);
  EtaKappa ek;
  double eta = 0.0, kappa = 0.0;
  for (int t = 0; t < 100; ++t) {
    SubsystemState s = state_from_host(h, rng.uniform(), rng.uniform());
    for (double& v : s.w1.values()) v = rng.normal();
    for (double& v : s.w2.values()) v = rng.normal();
    accumulate_eta_kappa(h, s, ek);
    EXPECT_GE(ek.eta, eta);
    EXPECT_GE(ek.kappa, kappa);
    eta = ek.eta;
    kappa = ek.kappa;
  }
  EXPECT_GT(eta, 0.0);
  EXPECT_GT(kappa, 0.0);
}

TEST(EtaKappa, OneUnitLinearModelMatchesHandDerivation) {
  NetworkSpec spec = testing::single_block(1, 1, 1, Activation::identity);
  Rng rng(8);
  WeightSet w = testing::random_weights(spec, rng);
  Matrix x = random_matrix(7, 1, rng), y = random_matrix(7, 1, rng);
  Host h = make_host(spec, w, GateField::ones(spec), x, y, 0, {1.0, 1.0, 0.5, 1.0});
  SubsystemState s = state_from_host(h, 1.0, 1.0);
  const double a = s.w1(0, 0), b = s.w1(0, 1), c = s.w2(0, 0);
  const double d = w.blocks[0].w3(0, 0), e = w.blocks[0].w3(0, 1);
  double c_on = 0.0, c_off = 0.0, g_a = 0.0, g_b = 0.0, g_c = 0.0;
  for (std::size_t r = 0; r < 7; ++r) {
    const double xi = x(r, 0), hid = a * xi + b;
    const double on = c * hid + d * xi + e - y(r, 0), off = d * xi + e - y(r, 0);
    c_on += 0.5 * on * on / 7.0;
    c_off += 0.5 * off * off / 7.0;
    g_a += on * c * xi / 7.0;
    g_b += on * c / 7.0;
    g_c += on * hid / 7.0;
  }
  const double n1 = std::hypot(a, b), n2 = std::abs(c);
  EtaKappa ek;
  accumulate_eta_kappa(h, s, ek);
  EXPECT_NEAR(ek.kappa, std::abs(c_on - c_off) / (n1 + n2), 1e-12);
  EXPECT_NEAR(ek.eta, std::max(std::abs(a * g_a + b * g_b) / n1, std::abs(c * g_c) / n2), 1e-12);
}

// ---- certification ----

TEST(Certify, StartsInsideRegionConverge) {
  Host h = small_host();
  Rng rng(9);
  EtaKappa ek = estimate_eta_kappa(h, 500, 1.0, rng);
  StabilityConsts c = stability_consts(h, ek);
  CertifyOptions opt;
  opt.integ.dt = 0.01;
  opt.integ.t_end = 200.0 / h.obj.lambda;
  SweepResult r = certify_sweep(h, c, Region::block, 0, 5, 1.0, 10, opt);
  EXPECT_EQ(r.passed, 5u);
  for (const auto& cert : r.certs) {
    EXPECT_LE(cert.terminal_w, 1e-3);
    EXPECT_LE(cert.terminal_factor, 1e-3);
  }
}

TEST(Certify, ClosedBlockStartFreezesUnitsAndDecays) {
  Host h = small_host();
  StabilityConsts c;
  c.threshold = 1e9;
  SubsystemState s = state_from_host(h, 0.0, 0.4);
  CertifyOptions opt;
  opt.integ.dt = 0.01;
  opt.integ.t_end = 50.0;
  Certificate cert = certify(h, c, s, Region::block, 0, opt);
  EXPECT_EQ(cert.verdict, Verdict::pass);
  EXPECT_EQ(cert.vanished, "theta_b");
}

TEST(Certify, FarOutsideRegionIsOutOfScope) {
  Host h = small_host();
  StabilityConsts c;
  c.threshold = 1e-4;
  SubsystemState s = state_from_host(h, 1.0, 1.0);
  for (double& v : s.w1.values()) v *= 20.0;
  CertifyOptions opt;
  opt.integ.dt = 0.01;
  opt.integ.t_end = 1.0;
  Certificate cert = certify(h, c, s, Region::block, 0, opt);
  EXPECT_FALSE(cert.in_region);
  EXPECT_EQ(cert.verdict, Verdict::out_of_scope);
}

TEST(Host, RejectsUngatedOrOversizedBlocks) {
  NetworkSpec s = testing::single_block(2, 2, 1, Activation::tanh, {false, true, false});
  Rng rng(11);
  WeightSet w = testing::random_weights(s, rng);
  EXPECT_THROW(make_host(s, w, GateField::ones(s), Matrix(2, 2), Matrix(2, 1), 0, {1, 1, 0.5, 1}), DomainError);
  NetworkSpec big = testing::single_block(2, kMaxVertexGates + 1, 1, Activation::tanh);
  WeightSet wb = testing::random_weights(big, rng);
  EXPECT_THROW(make_host(big, wb, GateField::ones(big), Matrix(2, 2), Matrix(2, 1), 0, {1, 1, 0.5, 1}),
               LimitError);
}

}  // namespace
}  // namespace gatecut

// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include <gtest/gtest.h>

#include <cmath>

#include "gatecut/arch.hpp"
#include "gatecut/complexity.hpp"
#include "gatecut/error.hpp"
#include "gatecut/finite_diff.hpp"
#include "gatecut/gates.hpp"
#include "test_util.hpp"

#ifndef GATECUT_DATA_DIR
#define GATECUT_DATA_DIR "data"
#endif

namespace gatecut {
namespace {

using testing::dense_block;

NetworkSpec toy_block() {
  NetworkSpec s;
  s.blocks.push_back(dense_block(4, 3, 5));
  return s;
}

// Random dense chain of 1 to 3 blocks; every block gates B, units and inputs.
NetworkSpec random_spec(Rng& rng) {
  NetworkSpec s;
  const std::size_t nb = 1 + rng.uniform_index(3);
  std::size_t in = 1 + rng.uniform_index(4);
  for (std::size_t l = 0; l < nb; ++l) {
    std::size_t out = 1 + rng.uniform_index(4);
    BlockSpec b = dense_block(in, 1 + rng.uniform_index(4), out, Activation::relu, {true, true, l > 0});
    if (rng.bernoulli(0.3) && in == out) b.skip = SkipKind::identity;
    s.blocks.push_back(b);
    in = out;
  }
  return s;
}

GateField random_theta(const NetworkSpec& s, Rng& rng) {
  GateField t = GateField::ones(s);
  for (double& v : t.block) v = rng.uniform();
  for (auto& u : t.unit)
    for (double& v : u) v = rng.uniform();
  for (std::size_t l = 1; l < t.input.size(); ++l)
    for (double& v : t.input[l]) v = rng.uniform();
  return t;
}

TEST(DeriveConsts, DenseHandCount) {
  ComplexityConsts c = derive_consts(toy_block());
  GateField ones = GateField::ones(toy_block());
  // 3*4 multiply-accumulates in, 3 activations, 3*5 out, 4*5 skip
  EXPECT_EQ(j_f_block(ones, c, 0), 50.0);
  EXPECT_EQ(j_p_block(ones, c, 0), 50.0);
  EXPECT_EQ(c.F, 50.0);
  EXPECT_EQ(c.P, 50.0);
  EXPECT_EQ(c.L, 1u);
}

TEST(DeriveConsts, IdentitySkipContributesNothing) {
  NetworkSpec s;
  BlockSpec b = dense_block(3, 2, 3);
  b.skip = SkipKind::identity;
  s.blocks.push_back(b);
  ComplexityConsts c = derive_consts(s);
  EXPECT_EQ(c.blocks[0].f3, 0.0);
  EXPECT_EQ(c.blocks[0].p3, 0.0);
  GateField t = GateField::ones(s);
  t.block[0] = 0.0;
  EXPECT_EQ(j_f_block(t, c, 0), 0.0);
  EXPECT_EQ(j_p_block(t, c, 0), 0.0);
}

TEST(DeriveConsts, ConvFactors) {
  NetworkSpec s = parse_arch("block in=64 hidden=64 out=64 skip=identity layer=conv kernels=3,3 spatial=7\n");
  ComplexityConsts c = derive_consts(s);
  EXPECT_EQ(c.blocks[0].f1(), 7.0 * 7.0 * 9.0);
  EXPECT_EQ(c.blocks[0].p1(), 9.0);
  EXPECT_EQ(c.blocks[0].fa, 49.0);
}

TEST(DeriveConsts, ConvParameterCount) {
  NetworkSpec s = parse_arch("block in=2 hidden=2 out=2 skip=identity layer=conv kernels=3,3 spatial=4\n");
  ComplexityConsts c = derive_consts(s);
  GateField ones = GateField::ones(s);
  // p1 |theta_1| |theta_2| = 9*2*2, biases 2, p2 term 9*2*2
  EXPECT_EQ(j_p_block(ones, c, 0), 36.0 + 2.0 + 36.0);
}

TEST(DeriveConsts, ConvWithoutSpatialDimsThrows) {
  NetworkSpec s = toy_block();
  s.blocks[0].layer = LayerKind::conv;
  s.blocks[0].kernels = {3, 3};
  EXPECT_THROW(derive_consts(s), Error);
}

TEST(JBlock, HalvingUnitThetasHalvesPathTerms) {
  NetworkSpec s = toy_block();
  ComplexityConsts c = derive_consts(s);
  GateField t = GateField::ones(s);
  const double skip = 20.0;
  const double full = j_f_block(t, c, 0) - skip;
  for (double& v : t.unit[0]) v *= 0.5;
  EXPECT_DOUBLE_EQ(j_f_block(t, c, 0) - skip, 0.5 * full);
}

TEST(JFp, NormalizationAndZero) {
  Rng rng(1);
  for (int k = 0; k < 10; ++k) {
    NetworkSpec s = random_spec(rng);
    ComplexityConsts c = derive_consts(s);
    const double alpha = rng.uniform(0.0, 2.0), beta = rng.uniform();
    EXPECT_NEAR(j_fp(GateField::ones(s), c, alpha, beta), 1.0 + alpha, 1e-12);
    EXPECT_EQ(j_fp(GateField::filled(s, 0.0), c, alpha, beta), 0.0);
  }
}

TEST(JFp, BetaZeroIgnoresFlopFactors) {
  Rng rng(2);
  NetworkSpec s = random_spec(rng);
  ComplexityConsts c = derive_consts(s);
  GateField t = random_theta(s, rng);
  const double v = j_fp(t, c, 0.3, 0.0);
  for (auto& b : c.blocks) {
    for (double& f : b.f) f *= 7.0;
    b.fa += 3.0;
  }
  c.F *= 11.0;
  EXPECT_EQ(j_fp(t, c, 0.3, 0.0), v);
}

TEST(JFp, MultilinearMidpoint) {
  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    NetworkSpec s = random_spec(rng);
    ComplexityConsts c = derive_consts(s);
    GateField t = random_theta(s, rng);
    std::vector<double> x = t.flatten();
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto at = [&](double v) {
        std::vector<double> y = x;
        y[i] = v;
        GateField g = t;
        g.assign(y);
        return j_fp(g, c, 0.4, 0.6);
      };
      EXPECT_NEAR(at(0.5), 0.5 * (at(0.0) + at(1.0)), 1e-12);
    }
  }
}

TEST(JFp, NondecreasingInEveryCoordinate) {
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    NetworkSpec s = random_spec(rng);
    ComplexityConsts c = derive_consts(s);
    GateField t = random_theta(s, rng);
    GateField g = grad_jfp(t, c, 0.5, rng.uniform());
    for (double v : g.flatten()) EXPECT_GE(v, 0.0);
  }
}

TEST(GammaSchedule, AlphaZeroGivesZeroBlockTerm) {
  NetworkSpec s = toy_block();
  ComplexityConsts c = derive_consts(s);
  GammaSchedule g = gamma_schedule(GateField::ones(s), c, 0.5, 0.0, 0.5, 100.0);
  for (double v : g.log_gamma_b) EXPECT_EQ(v, 0.0);
}

TEST(GammaSchedule, BlockTermHandValue) {
  NetworkSpec s = toy_block();
  ComplexityConsts c = derive_consts(s);
  GammaSchedule g = gamma_schedule(GateField::ones(s), c, 0.24, 0.2, 0.5, 1e4);
  EXPECT_NEAR(g.log_gamma_b[0], -480.0, 1e-9);
}

TEST(GammaSchedule, PenaltyIdentity) {
  Rng rng(5);
  for (int k = 0; k < 50; ++k) {
    NetworkSpec s = random_spec(rng);
    ComplexityConsts c = derive_consts(s);
    GateField t = random_theta(s, rng);
    const double nu = rng.uniform(0.01, 2.0), alpha = rng.uniform(0.0, 1.0), beta = rng.uniform();
    const double n = static_cast<double>(1 + rng.uniform_index(10000));
    GammaSchedule g = gamma_schedule(t, c, nu, alpha, beta, n);
    const double lhs = nu * j_fp(t, c, alpha, beta);
    EXPECT_LE(std::abs(lhs - schedule_penalty(t, g, n)), 1e-10 * std::abs(lhs));
    for (std::size_t l = 0; l < g.log_gamma_1.size(); ++l) {
      EXPECT_LE(g.log_gamma_1[l], 0.0);
      EXPECT_LE(g.log_gamma_2[l], 0.0);
    }
  }
}

TEST(GradJfp, BlockGradientWithClosedUnits) {
  NetworkSpec s = toy_block();
  ComplexityConsts c = derive_consts(s);
  GateField t = GateField::ones(s);
  for (double& v : t.unit[0]) v = 0.0;
  EXPECT_DOUBLE_EQ(grad_jfp(t, c, 0.7, 0.3).block[0], 0.7 / static_cast<double>(c.L));
}

TEST(GradJfp, MatchesFiniteDifferences) {
  Rng rng(6);
  for (int k = 0; k < 20; ++k) {
    NetworkSpec s = random_spec(rng);
    ComplexityConsts c = derive_consts(s);
    GateField t = random_theta(s, rng);
    const double alpha = rng.uniform(), beta = rng.uniform();
    auto f = [&](const std::vector<double>& x) {
      GateField g = t;
      g.assign(x);
      return j_fp(g, c, alpha, beta);
    };
    auto fd = finite_diff_grad(f, t.flatten(), 1e-4);
    auto an = grad_jfp(t, c, alpha, beta);
    // Ungated first-block inputs are pinned; compare only entries j_fp sees.
    auto a = an.flatten();
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], fd[i], 1e-8) << "entry " << i;
  }
}

TEST(GradJfp, CrossTermEqualsMixedPartial) {
  Rng rng(7);
  for (int k = 0; k < 20; ++k) {
    NetworkSpec s = random_spec(rng);
    ComplexityConsts c = derive_consts(s);
    GateField t = random_theta(s, rng);
    const double nu = rng.uniform(0.1, 3.0), beta = rng.uniform();
    const std::size_t l = rng.uniform_index(s.blocks.size());
    // d/dtheta_B of dJ/dtheta_1i by central differences of the analytic gradient
    auto du = [&](double tb) {
      GateField g = t;
      g.block[l] = tb;
      return grad_jfp(g, c, 0.2, beta).unit[l][0];
    };
    const double mixed = (du(t.block[l] + 1e-3) - du(t.block[l] - 1e-3)) / 2e-3;
    EXPECT_NEAR(nu * mixed, cross_term(t, c, l, nu, beta), 1e-10);
  }
}

TEST(GradJfp, CrossTermFloorIsPositiveLowerBound) {
  Rng rng(8);
  for (int k = 0; k < 50; ++k) {
    NetworkSpec s = random_spec(rng);
    ComplexityConsts c = derive_consts(s);
    GateField t = random_theta(s, rng);
    const double nu = rng.uniform(0.01, 3.0), beta = rng.uniform();
    for (std::size_t l = 0; l < s.blocks.size(); ++l) {
      const double rm = cross_term_floor(c, l, nu, beta);
      EXPECT_GT(rm, 0.0);
      EXPECT_GE(cross_term(t, c, l, nu, beta), rm * (1.0 - 1e-12));
    }
  }
}

TEST(Ratios, NothingPruned) {
  Rng rng(9);
  NetworkSpec s = random_spec(rng);
  PruneRatios r = ratios(s, GateState::init(s, 0.6));
  EXPECT_EQ(r.fpr, 0.0);
  EXPECT_EQ(r.ppr, 0.0);
  EXPECT_EQ(r.layers_left, layer_count(s));
}

TEST(Ratios, OneOfTwoIdenticalBlocksPruned) {
  NetworkSpec s;
  for (int l = 0; l < 2; ++l) {
    BlockSpec b = dense_block(4, 3, 4);
    b.skip = SkipKind::identity;
    s.blocks.push_back(b);
  }
  GateState g = GateState::init(s, 1.0);
  g.blocks[1].alive_b = false;
  g.blocks[1].theta_b = 0.0;
  PruneRatios r = ratios(s, g);
  EXPECT_DOUBLE_EQ(r.fpr, 50.0);
  EXPECT_DOUBLE_EQ(r.ppr, 50.0);
  EXPECT_EQ(r.layers_left, 2u);
}

TEST(Ratios, SpecAndMaskPathsAgree) {
  NetworkSpec s;
  for (int l = 0; l < 2; ++l) {
    BlockSpec b = dense_block(4, 3, 4);
    b.skip = SkipKind::identity;
    s.blocks.push_back(b);
  }
  NetworkSpec after = s;
  after.blocks[0].hidden = {1};
  GateState g = GateState::init(s, 1.0);
  g.blocks[0].alive_unit[1] = g.blocks[0].alive_unit[2] = 0;
  PruneRatios a = ratios(s, after), b = ratios(s, g);
  EXPECT_DOUBLE_EQ(a.fpr, b.fpr);
  EXPECT_DOUBLE_EQ(a.ppr, b.ppr);
  EXPECT_EQ(a.layers_left, b.layers_left);
}

TEST(AnalyzeStatic, EmptyNetworkWarns) {
  ComplexityReport r = analyze_static(NetworkSpec{});
  EXPECT_EQ(r.flops, 0.0);
  EXPECT_EQ(r.params, 0.0);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(AnalyzeStatic, DenseToyFile) {
  ComplexityReport r = analyze_static(parse_arch("block name=toy in=4 hidden=3 out=5 skip=dense\n"));
  ASSERT_EQ(r.blocks.size(), 1u);
  EXPECT_EQ(r.blocks[0].flops, 50.0);
  EXPECT_EQ(r.params, 50.0);
  EXPECT_NE(report_csv(r).find("toy"), std::string::npos);
}

TEST(AnalyzeStatic, ResNet50Totals) {
  ComplexityReport r = analyze_static(read_arch(std::string(GATECUT_DATA_DIR) + "/architectures/resnet50.arch"));
  EXPECT_NEAR(r.params / 25.56e6, 1.0, 0.02);
  EXPECT_NEAR(r.flops / 3.72e9, 1.0, 0.10);
  EXPECT_EQ(r.layers, 50u);
}

}  // namespace
}  // namespace gatecut

// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gatecut/arch.hpp"
#include "gatecut/gates.hpp"
#include "gatecut/network.hpp"

namespace gatecut {

// Cost factors of one block. f/p hold one factor per weight layer of the
// path (M+1 entries: f1 = f.front(), f2 = f.back()); fa/pa price a hidden
// unit's bias and activation; f3/p3 price the skip.
struct BlockConsts {
  std::vector<double> f;
  std::vector<double> p;
  double fa = 0.0;
  double pa = 0.0;
  double f3 = 0.0;
  double p3 = 0.0;
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<std::size_t> hidden;
  bool has_path = false;      // active at derivation time
  bool counts_layer = false;  // contributes to L (active or pruned path)
  bool dense_skip = false;

  double f1() const { return f.empty() ? 0.0 : f.front(); }
  double f2() const { return f.empty() ? 0.0 : f.back(); }
  double p1() const { return p.empty() ? 0.0 : p.front(); }
  double p2() const { return p.empty() ? 0.0 : p.back(); }
};

struct ComplexityConsts {
  std::vector<BlockConsts> blocks;
  double F = 0.0;     // baseline FLOPS, sum of J_F at theta = 1
  double P = 0.0;     // baseline parameters
  std::size_t L = 0;  // blocks with a (possibly pruned) nonlinear path
};

// Dense layers: f = p = 1, fa = pa = 1. Conv layers with output HxW and
// kernel k: f = H W k^2, p = k^2, fa = H W, pa = 1. Identity and pooling
// skips cost nothing; bias columns of W2/W3 are not counted.
ComplexityConsts derive_consts(const NetworkSpec& spec);

// Expected FLOPS / parameters of block l under Bernoulli parameters theta
// (as produced by GateState::theta or GateField::ones).
double j_f_block(const GateField& theta, const ComplexityConsts& c, std::size_t l);
double j_p_block(const GateField& theta, const ComplexityConsts& c, std::size_t l);

// beta sum J_F / F + (1 - beta) sum J_P / P + alpha sum theta_B / L
double j_fp(const GateField& theta, const ComplexityConsts& c, double alpha, double beta);

struct GammaSchedule {
  std::vector<double> log_gamma_b;
  std::vector<double> log_gamma_1;  // one scalar per block, shared by its units
  std::vector<double> log_gamma_2;
};

GammaSchedule gamma_schedule(const GateField& theta, const ComplexityConsts& c, double nu, double alpha,
                             double beta, double n);

// -(1/N)[sum theta_B log g_B + sum |theta_1| log g_1 + sum |theta_2| log g_2]
double schedule_penalty(const GateField& theta, const GammaSchedule& g, double n);

// d J_FP / d theta for every entry (ungated entries included; callers mask).
GateField grad_jfp(const GateField& theta, const ComplexityConsts& c, double alpha, double beta);

// nu d^2 J_FP / d theta_B d theta_1i for block l (same for every unit).
double cross_term(const GateField& theta, const ComplexityConsts& c, std::size_t l, double nu, double beta);
// nu (fa beta / F + pa (1 - beta) / P): lower bound of cross_term.
double cross_term_floor(const ComplexityConsts& c, std::size_t l, double nu, double beta);

// Weight layers in the network: M+1 per active path, plus one for every
// block without an active path whose skip is a dense layer.
std::size_t layer_count(const NetworkSpec& spec);

struct PruneRatios {
  double fpr = 0.0;  // percent of baseline FLOPS removed
  double ppr = 0.0;  // percent of baseline parameters removed
  std::size_t layers_left = 0;
  double flops = 0.0;
  double params = 0.0;
};

// Compares a compacted network against the unpruned baseline.
PruneRatios ratios(const NetworkSpec& before, const NetworkSpec& after);
// Same numbers computed on the masked network: live structures count as 1.
PruneRatios ratios(const NetworkSpec& before, const GateState& alive);

// 1 for every live entry, 0 for dead ones (ungated entries count as live).
GateField alive_field(const GateState& state);

struct BlockReport {
  std::string name;
  std::size_t in = 0;
  std::vector<std::size_t> hidden;
  std::size_t out = 0;
  std::string path;
  double flops = 0.0;
  double params = 0.0;
};

struct ComplexityReport {
  std::vector<BlockReport> blocks;
  double flops = 0.0;
  double params = 0.0;
  std::size_t layers = 0;
  std::size_t path_blocks = 0;
  std::vector<std::string> warnings;
};

ComplexityReport analyze_static(const NetworkSpec& spec);
std::string report_table(const ComplexityReport& r);
std::string report_csv(const ComplexityReport& r);

}  // namespace gatecut

// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include "gatecut/complexity.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "gatecut/error.hpp"

namespace gatecut {

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// |theta_2^l|_1 and |theta_2^{l+1}|_1, with theta_2^{L+1} pinned to ones.
double in_norm(const GateField& t, std::size_t l) { return sum(t.input.at(l)); }
double out_norm(const GateField& t, const ComplexityConsts& c, std::size_t l) {
  return l + 1 < c.blocks.size() ? sum(t.input.at(l + 1)) : static_cast<double>(c.blocks[l].out);
}

double block_cost(const GateField& t, const ComplexityConsts& c, std::size_t l, bool params) {
  const BlockConsts& b = c.blocks.at(l);
  const auto& f = params ? b.p : b.f;
  const double fa = params ? b.pa : b.fa;
  const double f3 = params ? b.p3 : b.f3;
  const double s2 = in_norm(t, l);
  const double s2n = out_norm(t, c, l);
  double j = f3 * s2 * s2n;
  if (b.has_path && !f.empty()) {
    const std::size_t m = b.hidden.size();
    std::vector<double> n(m);
    n[0] = sum(t.unit.at(l));
    for (std::size_t k = 1; k < m; ++k) n[k] = static_cast<double>(b.hidden[k]);
    double path = f[0] * n[0] * s2 + f[m] * n[m - 1] * s2n;
    for (std::size_t k = 0; k < m; ++k) path += fa * n[k];
    for (std::size_t k = 0; k + 1 < m; ++k) path += f[k + 1] * n[k] * n[k + 1];
    j += t.block.at(l) * path;
  }
  return j;
}

void require_single_layer(const ComplexityConsts& c) {
  for (const auto& b : c.blocks)
    if (b.hidden.size() > 1) throw ShapeError("gradients of the complexity index need M = 1 blocks");
}

}  // namespace

ComplexityConsts derive_consts(const NetworkSpec& spec) {
  validate(spec);
  ComplexityConsts c;
  for (const auto& b : spec.blocks) {
    BlockConsts k;
    k.in = b.in;
    k.out = b.out;
    k.has_path = b.has_path();
    k.counts_layer = b.path != PathKind::none;
    k.dense_skip = b.skip == SkipKind::dense;
    const bool conv = b.layer == LayerKind::conv;
    if (conv && (b.height == 0 || b.width == 0)) throw ShapeError("conv descriptor '" + b.name + "' is missing spatial dims");
    const double hw = conv ? static_cast<double>(b.height * b.width) : 1.0;
    if (k.has_path) {
      k.hidden = b.hidden;
      for (std::size_t m = 0; m <= b.hidden.size(); ++m) {
        double ks = conv ? static_cast<double>(b.kernels.at(m) * b.kernels.at(m)) : 1.0;
        k.f.push_back(hw * ks);
        k.p.push_back(ks);
      }
      k.fa = hw;
      k.pa = 1.0;
    }
    if (k.dense_skip) {
      double ks = conv ? static_cast<double>(b.skip_kernel * b.skip_kernel) : 1.0;
      k.f3 = hw * ks;
      k.p3 = ks;
    }
    if (k.counts_layer) ++c.L;
    c.blocks.push_back(std::move(k));
  }
  GateField ones = GateField::ones(spec);
  for (std::size_t l = 0; l < c.blocks.size(); ++l) {
    c.F += block_cost(ones, c, l, false);
    c.P += block_cost(ones, c, l, true);
  }
  return c;
}

double j_f_block(const GateField& theta, const ComplexityConsts& c, std::size_t l) {
  return block_cost(theta, c, l, false);
}

double j_p_block(const GateField& theta, const ComplexityConsts& c, std::size_t l) {
  return block_cost(theta, c, l, true);
}

double j_fp(const GateField& theta, const ComplexityConsts& c, double alpha, double beta) {
  double jf = 0.0, jp = 0.0, tb = 0.0;
  for (std::size_t l = 0; l < c.blocks.size(); ++l) {
    jf += j_f_block(theta, c, l);
    jp += j_p_block(theta, c, l);
    tb += theta.block.at(l);
  }
  double v = 0.0;
  if (c.F > 0.0) v += beta * jf / c.F;
  if (c.P > 0.0) v += (1.0 - beta) * jp / c.P;
  if (c.L > 0) v += alpha * tb / static_cast<double>(c.L);
  return v;
}

namespace {

// beta/F * (f1 s2 + fa + f2 s2') + (1-beta)/P * (p1 s2 + pa + p2 s2')
double unit_rate(const GateField& t, const ComplexityConsts& c, std::size_t l, double beta) {
  const BlockConsts& b = c.blocks[l];
  if (!b.has_path) return 0.0;
  const double s2 = in_norm(t, l), s2n = out_norm(t, c, l);
  double r = 0.0;
  if (c.F > 0.0) r += beta / c.F * (b.f1() * s2 + b.fa + b.f2() * s2n);
  if (c.P > 0.0) r += (1.0 - beta) / c.P * (b.p1() * s2 + b.pa + b.p2() * s2n);
  return r;
}

double skip_rate(const GateField& t, const ComplexityConsts& c, std::size_t l, double beta) {
  const BlockConsts& b = c.blocks[l];
  const double s2n = out_norm(t, c, l);
  double r = 0.0;
  if (c.F > 0.0) r += beta / c.F * b.f3 * s2n;
  if (c.P > 0.0) r += (1.0 - beta) / c.P * b.p3 * s2n;
  return r;
}

}  // namespace

GammaSchedule gamma_schedule(const GateField& theta, const ComplexityConsts& c, double nu, double alpha,
                             double beta, double n) {
  require_single_layer(c);
  GammaSchedule g;
  const double lb = c.L > 0 ? -nu * alpha * n / static_cast<double>(c.L) : 0.0;
  for (std::size_t l = 0; l < c.blocks.size(); ++l) {
    g.log_gamma_b.push_back(lb);
    g.log_gamma_1.push_back(-nu * n * theta.block.at(l) * unit_rate(theta, c, l, beta));
    g.log_gamma_2.push_back(-nu * n * skip_rate(theta, c, l, beta));
  }
  return g;
}

double schedule_penalty(const GateField& theta, const GammaSchedule& g, double n) {
  double s = 0.0;
  for (std::size_t l = 0; l < theta.block.size(); ++l) {
    s += theta.block[l] * g.log_gamma_b.at(l);
    s += sum(theta.unit[l]) * g.log_gamma_1.at(l);
    s += sum(theta.input[l]) * g.log_gamma_2.at(l);
  }
  return -s / n;
}

GateField grad_jfp(const GateField& theta, const ComplexityConsts& c, double alpha, double beta) {
  require_single_layer(c);
  GateField g = theta;
  const double wf = c.F > 0.0 ? beta / c.F : 0.0;
  const double wp = c.P > 0.0 ? (1.0 - beta) / c.P : 0.0;
  const std::size_t nb = c.blocks.size();
  for (std::size_t l = 0; l < nb; ++l) {
    const BlockConsts& b = c.blocks[l];
    const double s2 = in_norm(theta, l), s2n = out_norm(theta, c, l);
    const double n1 = sum(theta.unit[l]);
    const double tb = theta.block[l];
    double db = 0.0;
    if (b.has_path) {
      db = wf * (b.f1() * n1 * s2 + b.fa * n1 + b.f2() * n1 * s2n) +
           wp * (b.p1() * n1 * s2 + b.pa * n1 + b.p2() * n1 * s2n);
    }
    if (c.L > 0) db += alpha / static_cast<double>(c.L);
    g.block[l] = db;
    const double du = tb * unit_rate(theta, c, l, beta);
    for (double& v : g.unit[l]) v = du;
    // theta_2^l enters block l (W1, W3 fan-in) and block l-1 (W2, W3 fan-out).
    double di = 0.0;
    if (b.has_path) di += tb * n1 * (wf * b.f1() + wp * b.p1());
    di += s2n * (wf * b.f3 + wp * b.p3);
    if (l > 0) {
      const BlockConsts& pb = c.blocks[l - 1];
      const double pn1 = sum(theta.unit[l - 1]);
      const double ps2 = in_norm(theta, l - 1);
      if (pb.has_path) di += theta.block[l - 1] * pn1 * (wf * pb.f2() + wp * pb.p2());
      di += ps2 * (wf * pb.f3 + wp * pb.p3);
    }
    for (double& v : g.input[l]) v = di;
  }
  return g;
}

double cross_term(const GateField& theta, const ComplexityConsts& c, std::size_t l, double nu, double beta) {
  return nu * unit_rate(theta, c, l, beta);
}

double cross_term_floor(const ComplexityConsts& c, std::size_t l, double nu, double beta) {
  const BlockConsts& b = c.blocks.at(l);
  double r = 0.0;
  if (c.F > 0.0) r += b.fa * beta / c.F;
  if (c.P > 0.0) r += b.pa * (1.0 - beta) / c.P;
  return nu * r;
}

std::size_t layer_count(const NetworkSpec& spec) {
  std::size_t n = 0;
  for (const auto& b : spec.blocks) {
    if (b.has_path()) n += b.repeat() + 1;
    else if (b.skip == SkipKind::dense) n += 1;
  }
  return n;
}

GateField alive_field(const GateState& state) {
  GateField f;
  for (const auto& g : state.blocks) {
    f.block.push_back(g.has_path && g.alive_b ? 1.0 : 0.0);
    std::vector<double> u(g.alive_unit.size()), in(g.alive_input.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = g.alive_unit[i] ? 1.0 : 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) in[j] = g.alive_input[j] ? 1.0 : 0.0;
    f.unit.push_back(std::move(u));
    f.input.push_back(std::move(in));
  }
  return f;
}

PruneRatios ratios(const NetworkSpec& before, const NetworkSpec& after) {
  ComplexityConsts cb = derive_consts(before);
  ComplexityConsts ca = derive_consts(after);
  PruneRatios r;
  r.flops = ca.F;
  r.params = ca.P;
  r.fpr = cb.F > 0.0 ? 100.0 * (1.0 - ca.F / cb.F) : 0.0;
  r.ppr = cb.P > 0.0 ? 100.0 * (1.0 - ca.P / cb.P) : 0.0;
  r.layers_left = layer_count(after);
  return r;
}

PruneRatios ratios(const NetworkSpec& before, const GateState& alive) {
  check_shapes(before, alive);
  ComplexityConsts cb = derive_consts(before);
  GateField a = alive_field(alive);
  PruneRatios r;
  for (std::size_t l = 0; l < cb.blocks.size(); ++l) {
    r.flops += j_f_block(a, cb, l);
    r.params += j_p_block(a, cb, l);
  }
  r.fpr = cb.F > 0.0 ? 100.0 * (1.0 - r.flops / cb.F) : 0.0;
  r.ppr = cb.P > 0.0 ? 100.0 * (1.0 - r.params / cb.P) : 0.0;
  for (std::size_t l = 0; l < before.blocks.size(); ++l) {
    const BlockSpec& b = before.blocks[l];
    if (b.has_path() && alive.path_alive(l)) r.layers_left += b.repeat() + 1;
    else if (b.skip == SkipKind::dense) r.layers_left += 1;
  }
  return r;
}

ComplexityReport analyze_static(const NetworkSpec& spec) {
  ComplexityReport r;
  if (spec.blocks.empty()) {
    r.warnings.push_back("network has no blocks; all totals are zero");
    return r;
  }
  ComplexityConsts c = derive_consts(spec);
  GateField ones = GateField::ones(spec);
  for (std::size_t l = 0; l < spec.blocks.size(); ++l) {
    const BlockSpec& b = spec.blocks[l];
    BlockReport br;
    br.name = b.name.empty() ? "block" + std::to_string(l) : b.name;
    br.in = b.in;
    br.hidden = b.hidden;
    br.out = b.out;
    br.path = to_string(b.path);
    br.flops = j_f_block(ones, c, l);
    br.params = j_p_block(ones, c, l);
    r.blocks.push_back(br);
  }
  r.flops = c.F;
  r.params = c.P;
  r.layers = layer_count(spec);
  r.path_blocks = c.L;
  return r;
}

namespace {

std::string widths(const std::vector<std::size_t>& h) {
  if (h.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < h.size(); ++i) s += (i ? "," : "") + std::to_string(h[i]);
  return s;
}

}  // namespace

std::string report_table(const ComplexityReport& r) {
  std::ostringstream o;
  o << "# FLOPS: one multiply-accumulate = 1; fa = 1 per dense unit, H*W per conv channel\n";
  o << std::left << std::setw(14) << "block" << std::right << std::setw(7) << "in" << std::setw(14) << "hidden"
    << std::setw(7) << "out" << std::setw(8) << "path" << std::setw(16) << "flops" << std::setw(14) << "params"
    << "\n";
  for (const auto& b : r.blocks)
    o << std::left << std::setw(14) << b.name << std::right << std::setw(7) << b.in << std::setw(14)
      << widths(b.hidden) << std::setw(7) << b.out << std::setw(8) << b.path << std::setw(16) << std::fixed
      << std::setprecision(0) << b.flops << std::setw(14) << b.params << "\n";
  o << std::setprecision(4) << std::defaultfloat;
  o << "total flops  " << std::fixed << std::setprecision(0) << r.flops << " (" << std::setprecision(4)
    << r.flops / 1e9 << " G)\n";
  o << "total params " << std::setprecision(0) << r.params << " (" << std::setprecision(4) << r.params / 1e6
    << " M)\n";
  o << "weight layers " << r.layers << ", path blocks " << r.path_blocks << "\n";
  for (const auto& w : r.warnings) o << "warning: " << w << "\n";
  return o.str();
}

std::string report_csv(const ComplexityReport& r) {
  std::ostringstream o;
  o << "block,in,hidden,out,path,flops,params\n";
  o << std::setprecision(17);
  for (const auto& b : r.blocks) {
    std::string h = widths(b.hidden);
    for (char& ch : h)
      if (ch == ',') ch = ';';
    o << b.name << "," << b.in << "," << h << "," << b.out << "," << b.path << "," << b.flops << "," << b.params
      << "\n";
  }
  o << "total,,,,," << r.flops << "," << r.params << "\n";
  return o.str();
}

}  // namespace gatecut

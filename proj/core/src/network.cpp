// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include "gatecut/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gatecut/error.hpp"

namespace gatecut {

std::size_t WeightSet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.w1.size() + b.w2.size() + b.w3.size();
  return n;
}

double WeightSet::squared_norm() const {
  double s = 0.0;
  for (const auto& b : blocks) s += frobenius_sq(b.w1) + frobenius_sq(b.w2) + frobenius_sq(b.w3);
  return s;
}

GateField GateField::filled(const NetworkSpec& spec, double v) {
  GateField g;
  for (const auto& b : spec.blocks) {
    g.block.push_back(v);
    g.unit.emplace_back(b.has_path() ? b.units() : 0, v);
    g.input.emplace_back(b.in, v);
  }
  return g;
}

GateField GateField::ones(const NetworkSpec& spec) {
  GateField g = filled(spec, 1.0);
  for (std::size_t l = 0; l < spec.blocks.size(); ++l)
    if (!spec.blocks[l].has_path()) g.block[l] = 0.0;
  return g;
}

std::size_t GateField::size() const {
  std::size_t n = block.size();
  for (const auto& u : unit) n += u.size();
  for (const auto& v : input) n += v.size();
  return n;
}

std::vector<double> GateField::flatten() const {
  std::vector<double> out;
  out.reserve(size());
  for (std::size_t l = 0; l < block.size(); ++l) {
    out.push_back(block[l]);
    out.insert(out.end(), unit[l].begin(), unit[l].end());
    out.insert(out.end(), input[l].begin(), input[l].end());
  }
  return out;
}

void GateField::assign(const std::vector<double>& flat) {
  if (flat.size() != size()) throw ShapeError("GateField::assign: length mismatch");
  std::size_t k = 0;
  for (std::size_t l = 0; l < block.size(); ++l) {
    block[l] = flat[k++];
    for (double& v : unit[l]) v = flat[k++];
    for (double& v : input[l]) v = flat[k++];
  }
}

namespace {

void fill_uniform(Matrix& m, std::size_t fan_in_cols, double bound, Rng& rng) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < fan_in_cols; ++j) m(i, j) = rng.uniform(-bound, bound);
}

}  // namespace

WeightSet zeros_like(const NetworkSpec& spec) {
  WeightSet w;
  for (const auto& b : spec.blocks) {
    BlockWeights bw;
    if (b.has_path()) {
      bw.w1 = Matrix(b.units(), b.in + 1);
      bw.w2 = Matrix(b.out, b.units());
    }
    if (b.skip == SkipKind::dense) bw.w3 = Matrix(b.out, b.in + 1);
    w.blocks.push_back(std::move(bw));
  }
  return w;
}

WeightSet init_weights(const NetworkSpec& spec, Rng& rng) {
  require_trainable(spec);
  WeightSet w = zeros_like(spec);
  for (std::size_t l = 0; l < spec.blocks.size(); ++l) {
    const BlockSpec& b = spec.blocks[l];
    BlockWeights& bw = w.blocks[l];
    double in_bound = 1.0 / std::sqrt(static_cast<double>(b.in));
    if (b.has_path()) {
      fill_uniform(bw.w1, b.in, in_bound, rng);
      fill_uniform(bw.w2, b.units(), 1.0 / std::sqrt(static_cast<double>(b.units())), rng);
    }
    if (b.skip == SkipKind::dense) fill_uniform(bw.w3, b.in, in_bound, rng);
  }
  return w;
}

double activate(Activation a, double x) {
  switch (a) {
    case Activation::identity: return x;
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::tanh: return std::tanh(x);
    case Activation::softplus:
      // Shifted so that softplus(0) = 0.
      return (x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x))) - std::numbers::ln2;
  }
  return x;
}

double activate_grad(Activation a, double x) {
  switch (a) {
    case Activation::identity: return 1.0;
    case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: {
      double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::softplus:
      return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  }
  return 1.0;
}

namespace {

Matrix apply(Activation a, const Matrix& x) {
  Matrix y = x;
  if (a != Activation::identity)
    for (double& v : y.values()) v = activate(a, v);
  return y;
}

std::string block_name(const NetworkSpec& spec, std::size_t l) {
  std::string s = "block " + std::to_string(l);
  if (!spec.blocks[l].name.empty()) s += " (" + spec.blocks[l].name + ")";
  return s;
}

}  // namespace

void check_shapes(const NetworkSpec& spec, const WeightSet& w) {
  if (w.blocks.size() != spec.blocks.size()) throw ShapeError("weight set has wrong block count");
  for (std::size_t l = 0; l < spec.blocks.size(); ++l) {
    const BlockSpec& b = spec.blocks[l];
    const BlockWeights& bw = w.blocks[l];
    auto want = [&](const Matrix& m, std::size_t r, std::size_t c, const char* nm) {
      if (m.rows() != r || m.cols() != c)
        throw ShapeError(block_name(spec, l) + ": " + nm + " is " + m.shape() + ", expected (" + std::to_string(r) +
                         "x" + std::to_string(c) + ")");
    };
    if (b.has_path()) {
      want(bw.w1, b.units(), b.in + 1, "W1");
      want(bw.w2, b.out, b.units(), "W2");
    } else {
      want(bw.w1, 0, 0, "W1");
      want(bw.w2, 0, 0, "W2");
    }
    if (b.skip == SkipKind::dense) want(bw.w3, b.out, b.in + 1, "W3");
    else want(bw.w3, 0, 0, "W3");
  }
}

void check_shapes(const NetworkSpec& spec, const GateField& g) {
  if (g.block.size() != spec.blocks.size() || g.unit.size() != spec.blocks.size() ||
      g.input.size() != spec.blocks.size())
    throw ShapeError("gate field has wrong block count");
  for (std::size_t l = 0; l < spec.blocks.size(); ++l) {
    const BlockSpec& b = spec.blocks[l];
    if (g.unit[l].size() != (b.has_path() ? b.units() : 0) || g.input[l].size() != b.in)
      throw ShapeError(block_name(spec, l) + ": gate vector sizes do not match");
  }
}

ForwardTrace forward(const NetworkSpec& spec, const WeightSet& w, const GateField& xi, const Matrix& x,
                     const ForwardOptions& opt) {
  check_shapes(spec, w);
  check_shapes(spec, xi);
  if (x.cols() != spec.input_width())
    throw ShapeError("forward: input has " + std::to_string(x.cols()) + " columns, network expects " +
                     std::to_string(spec.input_width()));
  const std::size_t n = x.rows();
  ForwardTrace tr;
  tr.xi = xi;
  tr.blocks.resize(spec.blocks.size());
  Matrix z = x;
  for (std::size_t l = 0; l < spec.blocks.size(); ++l) {
    const BlockSpec& b = spec.blocks[l];
    const BlockWeights& bw = w.blocks[l];
    BlockTrace& bt = tr.blocks[l];
    bt.u = apply(b.pre, z);
    bt.zbar = Matrix(n, b.in + 1);
    const auto& x2 = xi.input[l];
    for (std::size_t r = 0; r < n; ++r) {
      const double* ur = bt.u.row(r);
      double* zr = bt.zbar.row(r);
      for (std::size_t j = 0; j < b.in; ++j) zr[j] = x2[j] * ur[j];
      zr[b.in] = 1.0;  // the bias input is never gated
    }
    Matrix out(n, b.out);
    bool skip = !opt.skip_path.empty() && opt.skip_path[l];
    try {
      if (b.has_path() && !skip) {
        bt.pre = matmul_nt(bt.zbar, bw.w1);
        bt.act = apply(b.act, bt.pre);
        bt.gated = bt.act;
        const auto& x1 = xi.unit[l];
        for (std::size_t r = 0; r < n; ++r) {
          double* gr = bt.gated.row(r);
          for (std::size_t i = 0; i < x1.size(); ++i) gr[i] *= x1[i];
        }
        bt.path = matmul_nt(bt.gated, bw.w2);
        bt.path_computed = true;
        axpy(xi.block[l], bt.path, out);
      }
      if (b.skip == SkipKind::dense) {
        Matrix s = matmul_nt(bt.zbar, bw.w3);
        axpy(1.0, s, out);
      } else if (b.skip == SkipKind::identity) {
        for (std::size_t r = 0; r < n; ++r) {
          const double* zr = bt.zbar.row(r);
          double* o = out.row(r);
          if (b.skip_map.empty()) {
            for (std::size_t k = 0; k < b.out; ++k) o[k] += zr[k];
          } else {
            for (std::size_t k = 0; k < b.out; ++k)
              if (b.skip_map[k] >= 0) o[k] += zr[b.skip_map[k]];
          }
        }
      } else {
        throw ShapeError(block_name(spec, l) + ": pooling skips cannot be evaluated");
      }
    } catch (const NumericError& e) {
      throw NumericError(block_name(spec, l) + ": " + e.what());
    }
    if (!all_finite(out)) throw NumericError("forward: non-finite activation in " + block_name(spec, l));
    bt.z = std::move(z);
    z = std::move(out);
  }
  tr.y = apply(spec.output, z);
  tr.z_out = std::move(z);
  if (!all_finite(tr.y)) throw NumericError("forward: non-finite network output");
  return tr;
}

double loss(const Matrix& pred, const Matrix& target, Task task) {
  if (pred.rows() != target.rows()) throw ShapeError("loss: batch size mismatch " + pred.shape() + " vs " + target.shape());
  const std::size_t n = pred.rows();
  if (n == 0) return 0.0;
  double total = 0.0;
  if (task == Task::regression) {
    if (pred.cols() != target.cols()) throw ShapeError("loss: width mismatch " + pred.shape() + " vs " + target.shape());
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < pred.cols(); ++c) {
        double d = pred(r, c) - target(r, c);
        s += d * d;
      }
      total += 0.5 * s;
    }
  } else {
    if (target.cols() != 1) throw ShapeError("loss: classification targets must be one column");
    for (std::size_t r = 0; r < n; ++r) {
      double t = target(r, 0);
      if (!(t >= 0.0) || t >= static_cast<double>(pred.cols()) || t != std::floor(t))
        throw DomainError("loss: class index " + std::to_string(t) + " out of range");
      const double* p = pred.row(r);
      double m = *std::max_element(p, p + pred.cols());
      double s = 0.0;
      for (std::size_t c = 0; c < pred.cols(); ++c) s += std::exp(p[c] - m);
      total += m + std::log(s) - p[static_cast<std::size_t>(t)];
    }
  }
  return total / static_cast<double>(n);
}

Matrix loss_grad(const Matrix& pred, const Matrix& target, Task task) {
  if (pred.rows() != target.rows()) throw ShapeError("loss_grad: batch size mismatch");
  const std::size_t n = pred.rows();
  Matrix g(pred.rows(), pred.cols());
  if (n == 0) return g;
  const double inv = 1.0 / static_cast<double>(n);
  if (task == Task::regression) {
    if (pred.cols() != target.cols()) throw ShapeError("loss_grad: width mismatch");
    for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] = (pred.data()[i] - target.data()[i]) * inv;
  } else {
    for (std::size_t r = 0; r < n; ++r) {
      double t = target(r, 0);
      if (!(t >= 0.0) || t >= static_cast<double>(pred.cols()) || t != std::floor(t))
        throw DomainError("loss_grad: class index " + std::to_string(t) + " out of range");
      const double* p = pred.row(r);
      double m = *std::max_element(p, p + pred.cols());
      double s = 0.0;
      for (std::size_t c = 0; c < pred.cols(); ++c) s += std::exp(p[c] - m);
      for (std::size_t c = 0; c < pred.cols(); ++c) g(r, c) = std::exp(p[c] - m) / s * inv;
      g(r, static_cast<std::size_t>(t)) -= inv;
    }
  }
  return g;
}

Gradients backward_from(const NetworkSpec& spec, const WeightSet& w, const ForwardTrace& tr, const Matrix& dy) {
  check_shapes(spec, w);
  if (tr.blocks.size() != spec.blocks.size()) throw ShapeError("backward: stale trace (block count)");
  if (dy.rows() != tr.y.rows() || dy.cols() != tr.y.cols())
    throw ShapeError("backward: output gradient " + dy.shape() + " does not match predictions " + tr.y.shape());
  const std::size_t n = dy.rows();
  Gradients g;
  g.dw = zeros_like(spec);
  g.dxi = GateField::filled(spec, 0.0);

  Matrix G = dy;
  if (spec.output != Activation::identity)
    for (std::size_t i = 0; i < G.size(); ++i) G.data()[i] *= activate_grad(spec.output, tr.z_out.data()[i]);

  for (std::size_t l = spec.blocks.size(); l-- > 0;) {
    const BlockSpec& b = spec.blocks[l];
    const BlockWeights& bw = w.blocks[l];
    const BlockTrace& bt = tr.blocks[l];
    if (bt.zbar.rows() != n || bt.zbar.cols() != b.in + 1 || G.cols() != b.out)
      throw ShapeError("backward: stale trace in " + block_name(spec, l));
    Matrix dzbar(n, b.in + 1);
    if (b.has_path() && bt.path_computed) {
      if (bt.pre.cols() != b.units()) throw ShapeError("backward: stale trace in " + block_name(spec, l));
      double s = 0.0;
      for (std::size_t i = 0; i < G.size(); ++i) s += G.data()[i] * bt.path.data()[i];
      g.dxi.block[l] = s;
      const double xb = tr.xi.block[l];
      if (xb != 0.0) {
        Matrix dp = scale(G, xb);
        g.dw.blocks[l].w2 = matmul_tn(dp, bt.gated);
        Matrix dgated = matmul(dp, bw.w2);
        auto& dx1 = g.dxi.unit[l];
        const auto& x1 = tr.xi.unit[l];
        Matrix dpre(n, b.units());
        for (std::size_t r = 0; r < n; ++r) {
          const double* dg = dgated.row(r);
          const double* ar = bt.act.row(r);
          const double* pr = bt.pre.row(r);
          double* dr = dpre.row(r);
          for (std::size_t i = 0; i < b.units(); ++i) {
            dx1[i] += dg[i] * ar[i];
            dr[i] = dg[i] * x1[i] * activate_grad(b.act, pr[i]);
          }
        }
        g.dw.blocks[l].w1 = matmul_tn(dpre, bt.zbar);
        dzbar = matmul(dpre, bw.w1);
      }
    }
    if (b.skip == SkipKind::dense) {
      g.dw.blocks[l].w3 = matmul_tn(G, bt.zbar);
      Matrix d = matmul(G, bw.w3);
      axpy(1.0, d, dzbar);
    } else if (b.skip == SkipKind::identity) {
      for (std::size_t r = 0; r < n; ++r) {
        const double* gr = G.row(r);
        double* dr = dzbar.row(r);
        if (b.skip_map.empty()) {
          for (std::size_t k = 0; k < b.out; ++k) dr[k] += gr[k];
        } else {
          for (std::size_t k = 0; k < b.out; ++k)
            if (b.skip_map[k] >= 0) dr[b.skip_map[k]] += gr[k];
        }
      }
    }
    Matrix dz(n, b.in);
    auto& dx2 = g.dxi.input[l];
    const auto& x2 = tr.xi.input[l];
    for (std::size_t r = 0; r < n; ++r) {
      const double* dr = dzbar.row(r);
      const double* ur = bt.u.row(r);
      const double* zr = bt.z.row(r);
      double* out = dz.row(r);
      for (std::size_t j = 0; j < b.in; ++j) {
        dx2[j] += dr[j] * ur[j];
        out[j] = dr[j] * x2[j] * activate_grad(b.pre, zr[j]);
      }
    }
    G = std::move(dz);
  }
  return g;
}

Gradients backward(const NetworkSpec& spec, const WeightSet& w, const ForwardTrace& trace, const Matrix& target) {
  return backward_from(spec, w, trace, loss_grad(trace.y, target, spec.task));
}

double accuracy(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || target.cols() != 1) throw ShapeError("accuracy: shape mismatch");
  if (pred.rows() == 0) return 0.0;
  std::size_t hit = 0;
  for (std::size_t r = 0; r < pred.rows(); ++r) {
    const double* p = pred.row(r);
    auto k = static_cast<std::size_t>(std::max_element(p, p + pred.cols()) - p);
    if (static_cast<double>(k) == target(r, 0)) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(pred.rows());
}

}  // namespace gatecut

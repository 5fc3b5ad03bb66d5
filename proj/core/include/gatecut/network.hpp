// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <vector>

#include "gatecut/arch.hpp"
#include "gatecut/matrix.hpp"
#include "gatecut/rng.hpp"

namespace gatecut {

// Per-block weights. Biases are the last column of w1 and w3. w1/w2 are
// empty for blocks without a path, w3 is empty unless the skip is dense.
struct BlockWeights {
  Matrix w1;  // K x (in+1)
  Matrix w2;  // out x K
  Matrix w3;  // out x (in+1)
  bool operator==(const BlockWeights&) const = default;
};

struct WeightSet {
  std::vector<BlockWeights> blocks;

  std::size_t parameter_count() const;
  double squared_norm() const;
  bool operator==(const WeightSet&) const = default;
};

// One real value per gate multiplier: xi_B per block, xi_1 per hidden unit,
// xi_2 per block input. Used for gate samples, theta values, gradients and
// optimizer moments alike. Blocks without a gate hold the constant 1 in
// samples (0 for xi_B of path-less blocks).
struct GateField {
  std::vector<double> block;
  std::vector<std::vector<double>> unit;
  std::vector<std::vector<double>> input;

  static GateField filled(const NetworkSpec& spec, double v);
  // Deterministic "everything on" sample for `spec`.
  static GateField ones(const NetworkSpec& spec);
  std::size_t size() const;
  // Flat view in the order block, units, inputs (block by block).
  std::vector<double> flatten() const;
  void assign(const std::vector<double>& flat);
  bool operator==(const GateField&) const = default;
};

// Fan-in scaled uniform init: entries ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)),
// biases zero.
WeightSet init_weights(const NetworkSpec& spec, Rng& rng);
WeightSet zeros_like(const NetworkSpec& spec);

double activate(Activation a, double x);
double activate_grad(Activation a, double x);

struct BlockTrace {
  Matrix z;         // block input
  Matrix u;         // h(z)
  Matrix zbar;      // [xi_2 . h(z), 1]
  Matrix pre;       // W1 zbar
  Matrix act;       // a(pre)
  Matrix gated;     // xi_1 . a(pre)
  Matrix path;      // W2 gated (before xi_B)
  bool path_computed = false;
};

struct ForwardTrace {
  std::vector<BlockTrace> blocks;
  Matrix z_out;  // last block output before the output activation
  Matrix y;      // predictions
  GateField xi;
};

struct ForwardOptions {
  // Blocks whose path is known dead; their path is not evaluated and its
  // xi_B gradient is reported as 0.
  std::vector<char> skip_path;
};

// x: batch x input_width, one sample per row.
ForwardTrace forward(const NetworkSpec& spec, const WeightSet& w, const GateField& xi, const Matrix& x,
                     const ForwardOptions& opt = {});

// Per-sample mean loss. Regression: 0.5 |y - t|^2. Classification: softmax
// cross-entropy with t holding class indices in its single column.
double loss(const Matrix& pred, const Matrix& target, Task task);
// d loss / d pred for the same convention.
Matrix loss_grad(const Matrix& pred, const Matrix& target, Task task);

struct Gradients {
  WeightSet dw;
  GateField dxi;
};

Gradients backward_from(const NetworkSpec& spec, const WeightSet& w, const ForwardTrace& trace, const Matrix& dy);
Gradients backward(const NetworkSpec& spec, const WeightSet& w, const ForwardTrace& trace, const Matrix& target);

// Fraction of rows whose argmax matches the class index in target.
double accuracy(const Matrix& pred, const Matrix& target);

void check_shapes(const NetworkSpec& spec, const WeightSet& w);
void check_shapes(const NetworkSpec& spec, const GateField& g);

}  // namespace gatecut

// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gatecut {

enum class Activation { identity, relu, tanh, softplus };
enum class SkipKind { dense, identity, pool };
// none: the block was declared without a nonlinear path (input/output
// layers). pruned: the path existed and was removed by training.
enum class PathKind { active, none, pruned };
enum class LayerKind { dense, conv };
enum class Task { regression, classification };

struct GatePlan {
  bool block = false;  // theta_B
  bool unit = false;   // theta_1, one per hidden unit
  bool input = false;  // theta_2, one per block input
  bool operator==(const GatePlan&) const = default;
};

// One residual block: z' = xi_B * W2 (xi_1 . a(W1 zbar)) + W3 zbar with
// zbar = xi_2 . h(z). `hidden` holds one width per nonlinear layer (M of
// them); the trainer only accepts M = 1.
struct BlockSpec {
  std::string name;
  std::size_t in = 0;
  std::vector<std::size_t> hidden;
  std::size_t out = 0;
  Activation act = Activation::relu;
  Activation pre = Activation::identity;
  SkipKind skip = SkipKind::dense;
  // Identity skips that lost dimensions to compaction: output k copies input
  // skip_map[k], or is zero when the entry is -1. Empty means plain identity.
  std::vector<long> skip_map;
  PathKind path = PathKind::active;
  GatePlan gates;
  LayerKind layer = LayerKind::dense;
  // Conv descriptors: one kernel size per weight layer of the path (M+1),
  // the output spatial size of the block and the shortcut kernel.
  std::vector<std::size_t> kernels;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t skip_kernel = 1;

  std::size_t repeat() const { return hidden.size(); }
  std::size_t units() const { return hidden.empty() ? 0 : hidden.front(); }
  bool has_path() const { return path == PathKind::active; }
  bool operator==(const BlockSpec&) const = default;
};

struct NetworkSpec {
  Task task = Task::regression;
  Activation output = Activation::identity;
  std::vector<BlockSpec> blocks;

  std::size_t input_width() const { return blocks.empty() ? 0 : blocks.front().in; }
  std::size_t output_width() const { return blocks.empty() ? 0 : blocks.back().out; }
  bool operator==(const NetworkSpec&) const = default;
};

const char* to_string(Activation a);
const char* to_string(SkipKind s);
const char* to_string(PathKind p);
const char* to_string(LayerKind k);
const char* to_string(Task t);
Activation parse_activation(const std::string& s);
Task parse_task(const std::string& s);

// Throws ShapeError on inconsistent widths or gate plans.
void validate(const NetworkSpec& spec);
// Additional restrictions of the training engine (M = 1, dense layers, no
// pooling skips). Throws ShapeError naming the offending block.
void require_trainable(const NetworkSpec& spec);

// Architecture text format; see docs/architecture-format.md.
NetworkSpec parse_arch(const std::string& text, const std::string& source = "<string>");
NetworkSpec read_arch(const std::string& path);
std::string write_arch(const NetworkSpec& spec);

// Convenience builder for dense residual MLPs: one input layer
// (no path, dense skip), `blocks` residual blocks of `units` hidden units
// with identity skips, and a dense output layer.
struct MlpShape {
  std::size_t in = 0;
  std::size_t width = 0;
  std::size_t units = 0;
  std::size_t blocks = 0;
  std::size_t out = 0;
  Task task = Task::regression;
  Activation act = Activation::relu;
  Activation pre = Activation::identity;
  bool input_gates = true;
};
NetworkSpec residual_mlp(const MlpShape& shape);

}  // namespace gatecut

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
#include "gatecut/data.hpp"
#include "gatecut/gates.hpp"
#include "gatecut/network.hpp"
#include "gatecut/optim.hpp"
#include "gatecut/prune.hpp"
#include "gatecut/rng.hpp"

namespace gatecut {

struct Hyperparams {
  double nu = 0.0;
  double alpha = 0.0;
  double beta = 0.5;
  double lambda = 1e-4;
  double theta_tol = 0.1;
  std::size_t batch = 128;
  std::size_t epochs = 10;

  double momentum = 0.9;
  LrSchedule lr_w;

  double lr_theta = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double theta_init = 0.75;
  std::size_t finalize_epoch = 0;  // 0: never round

  std::uint64_t seed = 0;
  std::size_t eval_max = 0;          // train rows used for train metrics, 0: all
  bool check_compaction = true;      // compare masked and compacted nets each epoch
  std::size_t check_inputs = 100;

  // Throws DomainError on out-of-range values. beta > 1 is allowed but
  // reported by warnings().
  void validate() const;
  std::vector<std::string> warnings() const;
};

struct MetricsRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean sampled batch loss over the epoch
  double test_loss = 0.0;   // mean-field (xi = theta) evaluation
  double train_acc = 0.0;   // NaN for regression
  double test_acc = 0.0;
  double fpr = 0.0;
  double ppr = 0.0;
  std::size_t layers_left = 0;
  double theta1_l1 = 0.0;       // sum of live unit thetas
  std::size_t undecided = 0;    // learned thetas in (tol, 1 - tol)
  std::size_t pruned = 0;       // removals in this epoch
  double compact_diff = 0.0;    // masked vs compacted max abs output diff
  double wall_seconds = 0.0;
};

std::string metrics_csv_header(bool wall_time = false);
std::string metrics_csv_row(const MetricsRecord& r, bool wall_time = false);

struct TrainState {
  NetworkSpec spec;  // uncompacted; dead structures are masked in place
  WeightSet weights;
  GateState gates;
  SgdMomentum sgd;
  AdamTheta adam;
  std::uint64_t iteration = 0;
  std::size_t epoch = 0;  // completed epochs
  Rng batch_rng;
  Rng gate_rng;
  std::vector<MetricsRecord> history;
  std::vector<PruneEvent> events;
};

TrainState init_state(const NetworkSpec& spec, const Hyperparams& hp);

// Straight-through theta gradient: dC/dxi + nu dJ_FP/dtheta on every free
// gate, 0 elsewhere.
GateField theta_grad_st(const GateField& dxi, const GateState& gates, const ComplexityConsts& consts, double nu,
                        double alpha, double beta);

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;  // NaN for regression
};

// Mean-field evaluation with xi = theta over the given rows.
EvalResult evaluate(const NetworkSpec& spec, const WeightSet& w, const GateState& g, const Dataset& d,
                    const std::vector<std::size_t>& rows);

// Max abs output difference between the masked network and its compaction
// on `n` standard normal inputs drawn from rng; NaN once pruning has
// disconnected the input from the output.
double compaction_diff(const NetworkSpec& spec, const WeightSet& w, const GateState& g, std::size_t n, Rng rng);

class Trainer {
 public:
  // Throws DomainError if nu > 0 and some block's R_m is not positive.
  Trainer(const NetworkSpec& spec, const Dataset& data, Hyperparams hp);
  // Resume from a saved state.
  Trainer(TrainState state, const Dataset& data, Hyperparams hp);

  // Runs one epoch, rounding and pruning at its end. On a non-finite loss
  // or update throws NumericError after rolling state() back to the start
  // of the failed epoch.
  const MetricsRecord& run_epoch();
  void run(const std::function<void(const MetricsRecord&, const std::vector<PruneEvent>&)>& on_epoch = {});
  bool done() const { return state_.epoch >= hp_.epochs; }

  const TrainState& state() const { return state_; }
  const TrainState& last_good() const { return last_good_; }
  const Hyperparams& hyper() const { return hp_; }
  const ComplexityConsts& consts() const { return consts_; }

  CompactNet result() const;

 private:
  void step(const std::vector<std::size_t>& rows, double lr, double& loss_sum);
  MetricsRecord measure(double train_loss, std::size_t pruned);

  TrainState state_;
  TrainState last_good_;
  const Dataset* data_;
  Hyperparams hp_;
  ComplexityConsts consts_;
  std::vector<std::size_t> eval_rows_;
};

}  // namespace gatecut

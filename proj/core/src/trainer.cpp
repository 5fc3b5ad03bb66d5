// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include "gatecut/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "gatecut/error.hpp"

namespace gatecut {

void Hyperparams::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw DomainError("hyperparameter out of range: " + what);
  };
  need(nu >= 0.0 && std::isfinite(nu), "nu >= 0");
  need(alpha >= 0.0 && std::isfinite(alpha), "alpha >= 0");
  need(beta >= 0.0 && std::isfinite(beta), "beta >= 0");
  need(lambda >= 0.0 && std::isfinite(lambda), "lambda >= 0");
  need(theta_tol > 0.0 && theta_tol < 0.5, "theta_tol in (0, 0.5)");
  need(batch >= 1, "batch >= 1");
  need(lr_w.base > 0.0, "lr > 0");
  need(lr_theta > 0.0, "theta lr > 0");
  need(momentum >= 0.0 && momentum < 1.0, "momentum in [0,1)");
  need(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "adam beta1 in [0,1)");
  need(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "adam beta2 in [0,1)");
  need(adam_eps > 0.0, "adam eps > 0");
  need(theta_init > 0.0 && theta_init <= 1.0, "theta_init in (0,1]");
}

std::vector<std::string> Hyperparams::warnings() const {
  std::vector<std::string> w;
  if (beta > 1.0) w.push_back("beta=" + std::to_string(beta) + " > 1 weights parameters negatively");
  return w;
}

std::string metrics_csv_header(bool wall_time) {
  std::string h =
      "epoch,train_loss,test_loss,train_acc,test_acc,fpr,ppr,layers_left,theta1_l1,undecided,pruned,compact_diff";
  if (wall_time) h += ",wall_seconds";
  return h;
}

std::string metrics_csv_row(const MetricsRecord& r, bool wall_time) {
  std::ostringstream o;
  o.precision(10);
  o << r.epoch << ',' << r.train_loss << ',' << r.test_loss << ',' << r.train_acc << ',' << r.test_acc << ','
    << r.fpr << ',' << r.ppr << ',' << r.layers_left << ',' << r.theta1_l1 << ',' << r.undecided << ','
    << r.pruned << ',' << r.compact_diff;
  if (wall_time) o << ',' << r.wall_seconds;
  return o.str();
}

TrainState init_state(const NetworkSpec& spec, const Hyperparams& hp) {
  require_trainable(spec);
  TrainState s;
  s.spec = spec;
  Rng root(hp.seed);
  Rng init = root.split(1);
  s.weights = init_weights(spec, init);
  s.gates = GateState::init(spec, hp.theta_init);
  s.sgd.momentum = hp.momentum;
  s.sgd.reset(s.weights);
  s.adam.beta1 = hp.adam_beta1;
  s.adam.beta2 = hp.adam_beta2;
  s.adam.eps = hp.adam_eps;
  s.adam.reset(GateField::filled(spec, 0.0));
  s.batch_rng = root.split(2);
  s.gate_rng = root.split(3);
  return s;
}

GateField theta_grad_st(const GateField& dxi, const GateState& gates, const ComplexityConsts& consts, double nu,
                        double alpha, double beta) {
  GateField theta = gates.theta();
  GateField out = dxi;
  for (double& v : out.block) v = 0.0;
  for (auto& u : out.unit) std::fill(u.begin(), u.end(), 0.0);
  for (auto& u : out.input) std::fill(u.begin(), u.end(), 0.0);
  const bool reg = nu != 0.0;
  GateField gj = reg ? grad_jfp(theta, consts, alpha, beta) : GateField{};
  for (const GateId& id : gates.free_gates()) at(out, id) = at(dxi, id) + (reg ? nu * at(gj, id) : 0.0);
  return out;
}

namespace {

ForwardOptions dead_paths(const GateState& g) {
  ForwardOptions opt;
  opt.skip_path.resize(g.blocks.size());
  for (std::size_t l = 0; l < g.blocks.size(); ++l) opt.skip_path[l] = !g.path_alive(l);
  return opt;
}

constexpr std::size_t kEvalChunk = 1024;

}  // namespace

EvalResult evaluate(const NetworkSpec& spec, const WeightSet& w, const GateState& g, const Dataset& d,
                    const std::vector<std::size_t>& rows) {
  EvalResult r;
  if (rows.empty()) {
    r.loss = r.accuracy = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const GateField xi = g.theta();
  const ForwardOptions opt = dead_paths(g);
  double loss_sum = 0.0;
  double acc_sum = 0.0;
  Matrix x, y;
  for (std::size_t b = 0; b < rows.size(); b += kEvalChunk) {
    std::vector<std::size_t> idx(rows.begin() + b, rows.begin() + std::min(rows.size(), b + kEvalChunk));
    gather(d, idx, x, y);
    ForwardTrace tr = forward(spec, w, xi, x, opt);
    const double n = static_cast<double>(idx.size());
    loss_sum += loss(tr.y, y, spec.task) * n;
    if (spec.task == Task::classification) acc_sum += accuracy(tr.y, y) * n;
  }
  const double n = static_cast<double>(rows.size());
  r.loss = loss_sum / n;
  r.accuracy = spec.task == Task::classification ? acc_sum / n : std::numeric_limits<double>::quiet_NaN();
  return r;
}

double compaction_diff(const NetworkSpec& spec, const WeightSet& w, const GateState& g, std::size_t n, Rng rng) {
  CompactNet c;
  try {
    c = compact(spec, w, g);
  } catch (const ShapeError&) {
    return std::numeric_limits<double>::quiet_NaN();  // disconnected
  }
  Matrix x(n, spec.input_width());
  for (double& v : x.values()) v = rng.normal();
  ForwardTrace a = forward(spec, w, g.theta(), x, dead_paths(g));
  ForwardTrace b = forward(c.spec, c.weights, c.gates.theta(), x);
  return max_abs_diff(a.y, b.y);
}

Trainer::Trainer(const NetworkSpec& spec, const Dataset& data, Hyperparams hp)
    : Trainer(init_state(spec, hp), data, hp) {}

Trainer::Trainer(TrainState state, const Dataset& data, Hyperparams hp)
    : state_(std::move(state)), data_(&data), hp_(hp) {
  hp_.validate();
  check_dataset(data);
  require_trainable(state_.spec);
  check_shapes(state_.spec, state_.weights);
  check_shapes(state_.spec, state_.gates);
  if (data.x.cols() != state_.spec.input_width())
    throw ShapeError("dataset has " + std::to_string(data.x.cols()) + " features, network expects " +
                     std::to_string(state_.spec.input_width()));
  if (data.task != state_.spec.task) throw DomainError("dataset task does not match the network task");
  if (data.train.empty()) throw DomainError("dataset has no training rows");
  consts_ = derive_consts(state_.spec);
  if (hp_.nu > 0.0)
    for (std::size_t l = 0; l < consts_.blocks.size(); ++l)
      if (consts_.blocks[l].has_path && !(cross_term_floor(consts_, l, hp_.nu, hp_.beta) > 0.0))
        throw DomainError("R_m <= 0 at block " + std::to_string(l) + " for beta=" + std::to_string(hp_.beta));
  eval_rows_ = data.train;
  if (hp_.eval_max > 0 && eval_rows_.size() > hp_.eval_max) eval_rows_.resize(hp_.eval_max);
  last_good_ = state_;
}

void Trainer::step(const std::vector<std::size_t>& rows, double lr, double& loss_sum) {
  TrainState& s = state_;
  Matrix x, y;
  gather(*data_, rows, x, y);
  GateField xi = s.gates.frozen ? s.gates.theta() : sample(s.gates, s.gate_rng);
  ForwardTrace tr = forward(s.spec, s.weights, xi, x, dead_paths(s.gates));
  const double l = loss(tr.y, y, s.spec.task);
  if (!std::isfinite(l))
    throw NumericError("non-finite loss at iteration " + std::to_string(s.iteration) + " (epoch " +
                       std::to_string(s.epoch + 1) + ")");
  loss_sum += l;
  Gradients g = backward(s.spec, s.weights, tr, y);
  s.sgd.step(s.weights, g.dw, lr, hp_.lambda);
  if (!s.gates.frozen) {
    GateField gt = theta_grad_st(g.dxi, s.gates, consts_, hp_.nu, hp_.alpha, hp_.beta);
    s.adam.step(s.gates, gt, hp_.lr_theta);
  }
  ++s.iteration;
}

const MetricsRecord& Trainer::run_epoch() {
  if (done()) throw DomainError("training already finished");
  last_good_ = state_;
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = data_->train.size();
  const std::size_t iters = (n + hp_.batch - 1) / hp_.batch;
  double loss_sum = 0.0;
  try {
    for (std::size_t it = 0; it < iters; ++it) {
      const double e = static_cast<double>(state_.epoch) + static_cast<double>(it) / static_cast<double>(iters);
      auto rows = sample_batch(*data_, hp_.batch, state_.batch_rng);
      step(rows, hp_.lr_w.at(e), loss_sum);
    }
  } catch (const NumericError&) {
    state_ = last_good_;
    throw;
  }
  ++state_.epoch;
  if (hp_.finalize_epoch > 0 && state_.epoch == hp_.finalize_epoch && !state_.gates.frozen)
    finalize_round(state_.gates);
  auto events = prune_pass(state_.spec, state_.weights, state_.gates, hp_.theta_tol, state_.epoch, &state_.sgd,
                           &state_.adam);
  state_.events.insert(state_.events.end(), events.begin(), events.end());
  MetricsRecord r = measure(loss_sum / static_cast<double>(iters), events.size());
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  state_.history.push_back(r);
  return state_.history.back();
}

void Trainer::run(const std::function<void(const MetricsRecord&, const std::vector<PruneEvent>&)>& on_epoch) {
  while (!done()) {
    const std::size_t before = state_.events.size();
    const MetricsRecord& r = run_epoch();
    if (on_epoch) {
      std::vector<PruneEvent> fresh(state_.events.begin() + static_cast<long>(before), state_.events.end());
      on_epoch(r, fresh);
    }
  }
}

MetricsRecord Trainer::measure(double train_loss, std::size_t pruned) {
  const TrainState& s = state_;
  MetricsRecord r;
  r.epoch = s.epoch;
  r.train_loss = train_loss;
  EvalResult tr = evaluate(s.spec, s.weights, s.gates, *data_, eval_rows_);
  EvalResult te = evaluate(s.spec, s.weights, s.gates, *data_, data_->test);
  r.test_loss = te.loss;
  r.train_acc = tr.accuracy;
  r.test_acc = te.accuracy;
  PruneRatios pr = ratios(s.spec, s.gates);
  r.fpr = pr.fpr;
  r.ppr = pr.ppr;
  r.layers_left = pr.layers_left;
  for (const GateId& id : s.gates.free_gates()) {
    const BlockGates& b = s.gates.blocks[id.block];
    double t = id.kind == GateKind::block  ? b.theta_b
               : id.kind == GateKind::unit ? b.theta_unit[id.index]
                                           : b.theta_input[id.index];
    if (id.kind == GateKind::unit) r.theta1_l1 += t;
    if (t > hp_.theta_tol && t < 1.0 - hp_.theta_tol) ++r.undecided;
  }
  r.pruned = pruned;
  if (hp_.check_compaction)
    r.compact_diff = compaction_diff(s.spec, s.weights, s.gates, hp_.check_inputs, Rng(hp_.seed).split(1000 + s.epoch));
  return r;
}

CompactNet Trainer::result() const { return compact(state_.spec, state_.weights, state_.gates); }

}  // namespace gatecut

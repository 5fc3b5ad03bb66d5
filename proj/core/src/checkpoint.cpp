// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include "gatecut/checkpoint.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "gatecut/error.hpp"
#include "json.hpp"

namespace gatecut {

using nlohmann::json;

namespace {

// JSON has no NaN; metrics use null for it.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double num(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

json to_j(const Matrix& m) { return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.values()}}; }

Matrix matrix_from(const json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.size()) throw IoError("checkpoint: matrix data length does not match its shape");
  m.values() = std::move(data);
  return m;
}

json to_j(const WeightSet& w) {
  json a = json::array();
  for (const auto& b : w.blocks) a.push_back({{"w1", to_j(b.w1)}, {"w2", to_j(b.w2)}, {"w3", to_j(b.w3)}});
  return a;
}

WeightSet weights_from(const json& j) {
  WeightSet w;
  for (const auto& b : j)
    w.blocks.push_back({matrix_from(b.at("w1")), matrix_from(b.at("w2")), matrix_from(b.at("w3"))});
  return w;
}

json to_j(const GateField& f) { return {{"block", f.block}, {"unit", f.unit}, {"input", f.input}}; }

GateField field_from(const json& j) {
  GateField f;
  f.block = j.at("block").get<std::vector<double>>();
  f.unit = j.at("unit").get<std::vector<std::vector<double>>>();
  f.input = j.at("input").get<std::vector<std::vector<double>>>();
  return f;
}

std::vector<int> bits(const std::vector<char>& v) { return {v.begin(), v.end()}; }
std::vector<char> chars(const json& j) {
  auto v = j.get<std::vector<int>>();
  return {v.begin(), v.end()};
}

json to_j(const GateState& g) {
  json a = json::array();
  for (const auto& b : g.blocks)
    a.push_back({{"plan", {b.plan.block, b.plan.unit, b.plan.input}},
                 {"has_path", b.has_path},
                 {"theta_b", b.theta_b},
                 {"alive_b", b.alive_b},
                 {"theta_unit", b.theta_unit},
                 {"alive_unit", bits(b.alive_unit)},
                 {"theta_input", b.theta_input},
                 {"alive_input", bits(b.alive_input)}});
  return {{"frozen", g.frozen}, {"blocks", a}};
}

GateState gates_from(const json& j) {
  GateState g;
  g.frozen = j.at("frozen").get<bool>();
  for (const auto& b : j.at("blocks")) {
    BlockGates bg;
    auto plan = b.at("plan").get<std::vector<bool>>();
    if (plan.size() != 3) throw IoError("checkpoint: gate plan needs three flags");
    bg.plan = {plan[0], plan[1], plan[2]};
    bg.has_path = b.at("has_path").get<bool>();
    bg.theta_b = b.at("theta_b").get<double>();
    bg.alive_b = b.at("alive_b").get<bool>();
    bg.theta_unit = b.at("theta_unit").get<std::vector<double>>();
    bg.alive_unit = chars(b.at("alive_unit"));
    bg.theta_input = b.at("theta_input").get<std::vector<double>>();
    bg.alive_input = chars(b.at("alive_input"));
    g.blocks.push_back(std::move(bg));
  }
  return g;
}

json to_j(const Rng& r) { return {{"seed", r.seed()}, {"counter", r.counter()}}; }
Rng rng_from(const json& j) { return Rng(j.at("seed").get<std::uint64_t>(), j.at("counter").get<std::uint64_t>()); }

json to_j(const MetricsRecord& r) {
  return {{"epoch", r.epoch},           {"train_loss", num(r.train_loss)}, {"test_loss", num(r.test_loss)},
          {"train_acc", num(r.train_acc)}, {"test_acc", num(r.test_acc)},    {"fpr", r.fpr},
          {"ppr", r.ppr},               {"layers_left", r.layers_left},    {"theta1_l1", r.theta1_l1},
          {"undecided", r.undecided},   {"pruned", r.pruned},              {"compact_diff", r.compact_diff},
          {"wall_seconds", r.wall_seconds}};
}

MetricsRecord record_from(const json& j) {
  MetricsRecord r;
  r.epoch = j.at("epoch").get<std::size_t>();
  r.train_loss = num(j.at("train_loss"));
  r.test_loss = num(j.at("test_loss"));
  r.train_acc = num(j.at("train_acc"));
  r.test_acc = num(j.at("test_acc"));
  r.fpr = j.at("fpr").get<double>();
  r.ppr = j.at("ppr").get<double>();
  r.layers_left = j.at("layers_left").get<std::size_t>();
  r.theta1_l1 = j.at("theta1_l1").get<double>();
  r.undecided = j.at("undecided").get<std::size_t>();
  r.pruned = j.at("pruned").get<std::size_t>();
  r.compact_diff = j.at("compact_diff").get<double>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  return r;
}

GateKind kind_from(const std::string& s) {
  if (s == "block") return GateKind::block;
  if (s == "unit") return GateKind::unit;
  if (s == "input") return GateKind::input;
  throw IoError("checkpoint: unknown gate kind '" + s + "'");
}

}  // namespace

std::string checkpoint_to_string(const TrainState& s, const CheckpointMeta& meta) {
  json events = json::array();
  for (const auto& e : s.events)
    events.push_back({{"epoch", e.epoch},
                      {"kind", to_string(e.kind)},
                      {"block", e.block},
                      {"index", e.index},
                      {"theta", e.theta},
                      {"reason", e.reason}});
  json history = json::array();
  for (const auto& r : s.history) history.push_back(to_j(r));
  json j = {{"format", "gatecut-checkpoint"},
            {"version", kCheckpointVersion},
            {"meta", json::object()},
            {"arch", write_arch(s.spec)},
            {"weights", to_j(s.weights)},
            {"gates", to_j(s.gates)},
            {"sgd", {{"momentum", s.sgd.momentum}, {"velocity", to_j(s.sgd.velocity)}}},
            {"adam",
             {{"beta1", s.adam.beta1},
              {"beta2", s.adam.beta2},
              {"eps", s.adam.eps},
              {"t", s.adam.t},
              {"m", to_j(s.adam.m)},
              {"v", to_j(s.adam.v)}}},
            {"iteration", s.iteration},
            {"epoch", s.epoch},
            {"batch_rng", to_j(s.batch_rng)},
            {"gate_rng", to_j(s.gate_rng)},
            {"history", history},
            {"events", events}};
  for (const auto& [k, v] : meta) j["meta"][k] = v;
  return j.dump(1) + "\n";
}

TrainState checkpoint_from_string(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(source + ": not a valid checkpoint: " + e.what());
  }
  try {
    if (j.value("format", "") != "gatecut-checkpoint") throw IoError(source + ": not a gatecut checkpoint");
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion)
      throw IoError(source + ": unsupported checkpoint version " + std::to_string(version));
    TrainState s;
    s.spec = parse_arch(j.at("arch").get<std::string>(), source + "#arch");
    s.weights = weights_from(j.at("weights"));
    s.gates = gates_from(j.at("gates"));
    s.sgd.momentum = j.at("sgd").at("momentum").get<double>();
    s.sgd.velocity = weights_from(j.at("sgd").at("velocity"));
    const json& a = j.at("adam");
    s.adam.beta1 = a.at("beta1").get<double>();
    s.adam.beta2 = a.at("beta2").get<double>();
    s.adam.eps = a.at("eps").get<double>();
    s.adam.t = a.at("t").get<std::uint64_t>();
    s.adam.m = field_from(a.at("m"));
    s.adam.v = field_from(a.at("v"));
    s.iteration = j.at("iteration").get<std::uint64_t>();
    s.epoch = j.at("epoch").get<std::size_t>();
    s.batch_rng = rng_from(j.at("batch_rng"));
    s.gate_rng = rng_from(j.at("gate_rng"));
    for (const auto& r : j.at("history")) s.history.push_back(record_from(r));
    for (const auto& e : j.at("events"))
      s.events.push_back({e.at("epoch").get<std::size_t>(), kind_from(e.at("kind").get<std::string>()),
                          e.at("block").get<std::size_t>(), e.at("index").get<std::size_t>(),
                          e.at("theta").get<double>(), e.at("reason").get<std::string>()});
    check_shapes(s.spec, s.weights);
    check_shapes(s.spec, s.gates);
    return s;
  } catch (const json::exception& e) {
    throw IoError(source + ": malformed checkpoint: " + e.what());
  }
}

void save_checkpoint(const std::string& path, const TrainState& s, const CheckpointMeta& meta) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write checkpoint " + path);
  f << checkpoint_to_string(s, meta);
  if (!f) throw IoError("failed writing checkpoint " + path);
}

TrainState load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return checkpoint_from_string(ss.str(), path);
}

}  // namespace gatecut

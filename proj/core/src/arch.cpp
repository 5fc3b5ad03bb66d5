// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include "gatecut/arch.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "gatecut/error.hpp"

namespace gatecut {

const char* to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::softplus: return "softplus";
  }
  return "?";
}

const char* to_string(SkipKind s) {
  switch (s) {
    case SkipKind::dense: return "dense";
    case SkipKind::identity: return "identity";
    case SkipKind::pool: return "pool";
  }
  return "?";
}

const char* to_string(PathKind p) {
  switch (p) {
    case PathKind::active: return "active";
    case PathKind::none: return "none";
    case PathKind::pruned: return "pruned";
  }
  return "?";
}

const char* to_string(LayerKind k) { return k == LayerKind::conv ? "conv" : "dense"; }

const char* to_string(Task t) { return t == Task::classification ? "classification" : "regression"; }

Activation parse_activation(const std::string& s) {
  if (s == "identity" || s == "linear") return Activation::identity;
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  if (s == "softplus") return Activation::softplus;
  throw DomainError("unknown activation '" + s + "'");
}

Task parse_task(const std::string& s) {
  if (s == "regression") return Task::regression;
  if (s == "classification") return Task::classification;
  throw DomainError("unknown task '" + s + "'");
}

namespace {

std::string block_tag(std::size_t i, const BlockSpec& b) {
  std::string t = "block " + std::to_string(i);
  if (!b.name.empty()) t += " (" + b.name + ")";
  return t;
}

}  // namespace

void validate(const NetworkSpec& spec) {
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const BlockSpec& b = spec.blocks[i];
    const std::string tag = block_tag(i, b);
    if (b.in == 0 || b.out == 0) throw ShapeError(tag + ": widths must be >= 1");
    if (b.path == PathKind::active) {
      if (b.hidden.empty()) throw ShapeError(tag + ": active path needs hidden widths");
    } else if (!b.hidden.empty()) {
      throw ShapeError(tag + ": hidden widths given for a block without a path");
    }
    for (std::size_t h : b.hidden)
      if (h == 0) throw ShapeError(tag + ": hidden widths must be >= 1");
    if (b.skip == SkipKind::identity) {
      if (b.skip_map.empty()) {
        if (b.in != b.out) throw ShapeError(tag + ": identity skip requires in == out");
      } else {
        if (b.skip_map.size() != b.out) throw ShapeError(tag + ": skip_map length must equal out");
        for (long m : b.skip_map)
          if (m < -1 || m >= static_cast<long>(b.in)) throw ShapeError(tag + ": skip_map entry out of range");
      }
    } else if (!b.skip_map.empty()) {
      throw ShapeError(tag + ": skip_map only applies to identity skips");
    }
    if (!b.has_path() && (b.gates.block || b.gates.unit))
      throw ShapeError(tag + ": block/unit gates need an active path");
    if (i == 0 && b.gates.input) throw ShapeError(tag + ": the network input cannot be gated");
    if (b.layer == LayerKind::conv) {
      if (b.height == 0 || b.width == 0) throw ShapeError(tag + ": conv descriptor needs spatial dims");
      std::size_t need = b.has_path() ? b.hidden.size() + 1 : 0;
      if (b.has_path() && b.kernels.size() != need)
        throw ShapeError(tag + ": conv path needs " + std::to_string(need) + " kernel sizes");
    }
    if (i + 1 < spec.blocks.size() && spec.blocks[i + 1].in != b.out)
      throw ShapeError(tag + ": out=" + std::to_string(b.out) + " does not match next block in=" +
                       std::to_string(spec.blocks[i + 1].in));
  }
}

void require_trainable(const NetworkSpec& spec) {
  validate(spec);
  if (spec.blocks.empty()) throw ShapeError("network has no blocks");
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const BlockSpec& b = spec.blocks[i];
    const std::string tag = block_tag(i, b);
    if (b.repeat() > 1) throw ShapeError(tag + ": training requires M = 1 (got M = " + std::to_string(b.repeat()) + ")");
    if (b.layer != LayerKind::dense) throw ShapeError(tag + ": conv layers are descriptor-only");
    if (b.skip == SkipKind::pool) throw ShapeError(tag + ": pooling skips are descriptor-only");
  }
}

namespace {

struct LineCtx {
  const std::string& source;
  std::size_t line;
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(source, line, msg); }
};

std::size_t parse_count(const std::string& v, const LineCtx& ctx, const std::string& key) {
  try {
    std::size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size() || x < 0) throw std::invalid_argument(v);
    return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
    ctx.fail("bad value for " + key + ": '" + v + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::vector<std::size_t> parse_counts(const std::string& v, const LineCtx& ctx, const std::string& key) {
  std::vector<std::size_t> out;
  for (const auto& p : split(v, ',')) out.push_back(parse_count(p, ctx, key));
  if (out.empty()) ctx.fail("empty list for " + key);
  return out;
}

template <typename T, typename Fn>
T parse_enum(const std::string& v, const LineCtx& ctx, Fn fn) {
  try {
    return fn(v);
  } catch (const DomainError& e) {
    ctx.fail(e.what());
  }
}

SkipKind parse_skip(const std::string& v) {
  if (v == "dense") return SkipKind::dense;
  if (v == "identity") return SkipKind::identity;
  if (v == "pool") return SkipKind::pool;
  throw DomainError("unknown skip kind '" + v + "'");
}

PathKind parse_path(const std::string& v) {
  if (v == "active") return PathKind::active;
  if (v == "none") return PathKind::none;
  if (v == "pruned") return PathKind::pruned;
  throw DomainError("unknown path kind '" + v + "'");
}

LayerKind parse_layer(const std::string& v) {
  if (v == "dense") return LayerKind::dense;
  if (v == "conv") return LayerKind::conv;
  throw DomainError("unknown layer kind '" + v + "'");
}

GatePlan parse_gates(const std::string& v, const LineCtx& ctx) {
  GatePlan g;
  if (v == "none") return g;
  for (const auto& t : split(v, ',')) {
    if (t == "B") g.block = true;
    else if (t == "1") g.unit = true;
    else if (t == "2") g.input = true;
    else ctx.fail("unknown gate '" + t + "' (expected B, 1, 2 or none)");
  }
  return g;
}

std::map<std::string, std::string> parse_kv(std::istringstream& in, const LineCtx& ctx) {
  std::map<std::string, std::string> kv;
  std::string tok;
  while (in >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) ctx.fail("expected key=value, got '" + tok + "'");
    std::string key = tok.substr(0, eq);
    if (kv.count(key)) ctx.fail("duplicate key '" + key + "'");
    kv[key] = tok.substr(eq + 1);
  }
  return kv;
}

}  // namespace

NetworkSpec parse_arch(const std::string& text, const std::string& source) {
  NetworkSpec spec;
  bool have_header = false;
  std::istringstream lines(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(lines, raw)) {
    ++lineno;
    LineCtx ctx{source, lineno};
    auto hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    std::istringstream in(line);
    std::string kind;
    if (!(in >> kind)) continue;
    auto kv = parse_kv(in, ctx);
    auto take = [&](const std::string& k) -> std::string {
      auto it = kv.find(k);
      if (it == kv.end()) return {};
      std::string v = it->second;
      kv.erase(it);
      return v;
    };
    if (kind == "network") {
      if (have_header) ctx.fail("duplicate network line");
      if (!spec.blocks.empty()) ctx.fail("network line must precede blocks");
      have_header = true;
      if (auto v = take("task"); !v.empty()) spec.task = parse_enum<Task>(v, ctx, parse_task);
      if (auto v = take("output"); !v.empty()) spec.output = parse_enum<Activation>(v, ctx, parse_activation);
    } else if (kind == "block") {
      BlockSpec b;
      b.name = take("name");
      std::string v;
      if ((v = take("in")).empty()) ctx.fail("block needs in=");
      b.in = parse_count(v, ctx, "in");
      if ((v = take("out")).empty()) ctx.fail("block needs out=");
      b.out = parse_count(v, ctx, "out");
      if (auto p = take("path"); !p.empty()) b.path = parse_enum<PathKind>(p, ctx, parse_path);
      if (auto h = take("hidden"); !h.empty()) b.hidden = parse_counts(h, ctx, "hidden");
      if (auto m = take("M"); !m.empty()) {
        std::size_t reps = parse_count(m, ctx, "M");
        if (b.hidden.size() != 1 || reps == 0) ctx.fail("M= needs a single hidden width and M >= 1");
        b.hidden.assign(reps, b.hidden.front());
      }
      if (auto a = take("act"); !a.empty()) b.act = parse_enum<Activation>(a, ctx, parse_activation);
      if (auto a = take("pre"); !a.empty()) b.pre = parse_enum<Activation>(a, ctx, parse_activation);
      if (auto s = take("skip"); !s.empty()) b.skip = parse_enum<SkipKind>(s, ctx, parse_skip);
      if (auto s = take("skip_map"); !s.empty()) {
        for (const auto& t : split(s, ',')) {
          try {
            std::size_t pos = 0;
            long x = std::stol(t, &pos);
            if (pos != t.size()) throw std::invalid_argument(t);
            b.skip_map.push_back(x);
          } catch (const std::exception&) {
            ctx.fail("bad skip_map entry '" + t + "'");
          }
        }
      }
      std::string g = take("gates");
      if (!g.empty()) {
        b.gates = parse_gates(g, ctx);
      } else if (b.has_path()) {
        b.gates = GatePlan{true, true, !spec.blocks.empty()};
      } else {
        b.gates = GatePlan{false, false, !spec.blocks.empty()};
      }
      if (auto l = take("layer"); !l.empty()) b.layer = parse_enum<LayerKind>(l, ctx, parse_layer);
      if (auto k = take("kernels"); !k.empty()) b.kernels = parse_counts(k, ctx, "kernels");
      if (auto s = take("spatial"); !s.empty()) {
        auto x = s.find('x');
        if (x == std::string::npos) {
          b.height = b.width = parse_count(s, ctx, "spatial");
        } else {
          b.height = parse_count(s.substr(0, x), ctx, "spatial");
          b.width = parse_count(s.substr(x + 1), ctx, "spatial");
        }
      }
      if (auto k = take("skip_kernel"); !k.empty()) b.skip_kernel = parse_count(k, ctx, "skip_kernel");
      if (b.layer == LayerKind::conv && b.kernels.size() == 1 && b.has_path())
        b.kernels.assign(b.hidden.size() + 1, b.kernels.front());
      spec.blocks.push_back(std::move(b));
    } else {
      ctx.fail("unknown record '" + kind + "' (expected network or block)");
    }
    if (!kv.empty()) ctx.fail("unknown key '" + kv.begin()->first + "'");
  }
  try {
    validate(spec);
  } catch (const ShapeError& e) {
    throw ParseError(source, lineno, e.what());
  }
  return spec;
}

NetworkSpec read_arch(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open architecture file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_arch(ss.str(), path);
}

namespace {

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

std::string write_arch(const NetworkSpec& spec) {
  std::ostringstream out;
  out << "network task=" << to_string(spec.task) << " output=" << to_string(spec.output) << "\n";
  for (const BlockSpec& b : spec.blocks) {
    out << "block";
    if (!b.name.empty()) out << " name=" << b.name;
    out << " in=" << b.in;
    if (!b.hidden.empty()) out << " hidden=" << join(b.hidden);
    out << " out=" << b.out << " act=" << to_string(b.act) << " pre=" << to_string(b.pre)
        << " skip=" << to_string(b.skip);
    if (!b.skip_map.empty()) out << " skip_map=" << join(b.skip_map);
    out << " path=" << to_string(b.path) << " gates=";
    if (!b.gates.block && !b.gates.unit && !b.gates.input) {
      out << "none";
    } else {
      std::vector<std::string> g;
      if (b.gates.block) g.push_back("B");
      if (b.gates.unit) g.push_back("1");
      if (b.gates.input) g.push_back("2");
      for (std::size_t i = 0; i < g.size(); ++i) out << (i ? "," : "") << g[i];
    }
    if (b.layer == LayerKind::conv) {
      out << " layer=conv";
      if (!b.kernels.empty()) out << " kernels=" << join(b.kernels);
      out << " spatial=" << b.height << "x" << b.width << " skip_kernel=" << b.skip_kernel;
    }
    out << "\n";
  }
  return out.str();
}

NetworkSpec residual_mlp(const MlpShape& s) {
  NetworkSpec spec;
  spec.task = s.task;
  BlockSpec input;
  input.name = "input";
  input.in = s.in;
  input.out = s.width;
  input.path = PathKind::none;
  input.skip = SkipKind::dense;
  input.act = s.act;
  spec.blocks.push_back(input);
  for (std::size_t l = 0; l < s.blocks; ++l) {
    BlockSpec b;
    b.name = "res" + std::to_string(l + 1);
    b.in = b.out = s.width;
    b.hidden = {s.units};
    b.act = s.act;
    b.pre = s.pre;
    b.skip = SkipKind::identity;
    b.gates = GatePlan{true, true, s.input_gates};
    spec.blocks.push_back(b);
  }
  BlockSpec head;
  head.name = "output";
  head.in = s.width;
  head.out = s.out;
  head.path = PathKind::none;
  head.skip = SkipKind::dense;
  head.act = s.act;
  head.pre = s.pre;
  head.gates = GatePlan{false, false, s.input_gates};
  spec.blocks.push_back(head);
  validate(spec);
  return spec;
}

}  // namespace gatecut

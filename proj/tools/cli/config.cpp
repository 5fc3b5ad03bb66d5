// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include "config.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gatecut/error.hpp"

namespace gatecut::cli {

namespace {

struct Key {
  const char* section;
  const char* key;
  const char* value;
};

// The schema doubles as the default configuration.
const Key kSchema[] = {
    {"run", "seed", "1"},
    {"run", "out", "gatecut-out"},
    {"run", "plots", "true"},
    {"run", "wall_time", "false"},

    {"model", "arch", ""},
    {"model", "width", "32"},
    {"model", "units", "32"},
    {"model", "blocks", "4"},
    {"model", "act", "relu"},
    {"model", "pre", "identity"},
    {"model", "input_gates", "true"},

    {"data", "source", "teacher_student"},
    {"data", "n", "2000"},
    {"data", "test_fraction", "0.2"},
    {"data", "standardize", "feature"},
    {"data", "seed", ""},
    {"data", "noise", "0.05"},
    {"data", "in", "8"},
    {"data", "out", "1"},
    {"data", "teacher_width", "8"},
    {"data", "teacher_units", "4"},
    {"data", "teacher_blocks", "2"},
    {"data", "teacher_act", "tanh"},
    {"data", "classes", "3"},
    {"data", "separation", "3"},
    {"data", "dim", "2"},
    {"data", "turns", "1"},
    {"data", "mnist_dir", ""},

    {"trainer", "nu", "0"},
    {"trainer", "alpha", "0"},
    {"trainer", "beta", "0.5"},
    {"trainer", "lambda", "1e-4"},
    {"trainer", "theta_tol", "0.1"},
    {"trainer", "batch", "128"},
    {"trainer", "epochs", "10"},
    {"trainer", "momentum", "0.9"},
    {"trainer", "lr", "0.05"},
    {"trainer", "schedule", "cosine"},
    {"trainer", "milestones", ""},
    {"trainer", "lr_factor", "0.1"},
    {"trainer", "restart_period", "10"},
    {"trainer", "restart_mult", "1"},
    {"trainer", "theta_lr", "2e-3"},
    {"trainer", "adam_beta1", "0.9"},
    {"trainer", "adam_beta2", "0.999"},
    {"trainer", "adam_eps", "1e-8"},
    {"trainer", "theta_init", "0.75"},
    {"trainer", "finalize_epoch", "0"},
    {"trainer", "eval_max", "0"},
    {"trainer", "check_compaction", "true"},

    {"odelab", "in", "2"},
    {"odelab", "units", "2"},
    {"odelab", "out", "1"},
    {"odelab", "samples", "16"},
    {"odelab", "act", "softplus"},
    {"odelab", "nu", "1"},
    {"odelab", "alpha", "1"},
    {"odelab", "beta", "0.5"},
    {"odelab", "lambda", "1"},
    {"odelab", "eta_samples", "2000"},
    {"odelab", "w_max", "1"},
    {"odelab", "starts", "100"},
    {"odelab", "region", "both"},
    {"odelab", "unit", "0"},
    {"odelab", "method", "rk4"},
    {"odelab", "dt", "1e-3"},
    {"odelab", "t_end", ""},
    {"odelab", "tol", "1e-3"},
    {"odelab", "slack_c", "1"},
    {"odelab", "dump", "3"},
    {"odelab", "dt_halving", "false"},

    {"verify", "instances", "20"},
    {"verify", "trials", "200"},
    {"verify", "fault", "none"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool in_schema(const std::string& section, const std::string& key) {
  for (const Key& k : kSchema)
    if (section == k.section && key == k.key) return true;
  return false;
}

bool known_section(const std::string& section) {
  for (const Key& k : kSchema)
    if (section == k.section) return true;
  return false;
}

[[noreturn]] void bad_value(const std::string& section, const std::string& key, const std::string& v,
                            const char* want) {
  throw DomainError("config " + section + "." + key + ": '" + v + "' is not " + want);
}

}  // namespace

Config Config::defaults() {
  Config c;
  for (const Key& k : kSchema) c.values_[k.section][k.key] = k.value;
  return c;
}

Config Config::parse(const std::string& text, const std::string& source) {
  Config c = defaults();
  c.source_ = source;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(source, n, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_section(section)) throw ParseError(source, n, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, n, "expected key = value");
    if (section.empty()) throw ParseError(source, n, "key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    if (!in_schema(section, key)) throw ParseError(source, n, "unknown key '" + key + "' in [" + section + "]");
    c.values_[section][key] = trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::read(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  Config c = parse(ss.str(), path);
  c.base_dir_ = std::filesystem::path(path).parent_path().string();
  return c;
}

void Config::set(const std::string& dotted, const std::string& value) {
  const auto dot = dotted.find('.');
  if (dot == std::string::npos) throw DomainError("override key '" + dotted + "' must be section.key");
  const std::string section = dotted.substr(0, dot);
  const std::string key = dotted.substr(dot + 1);
  if (!in_schema(section, key)) throw DomainError("unknown config key '" + dotted + "'");
  values_[section][key] = value;
}

const std::string& Config::get(const std::string& section, const std::string& key) const {
  auto s = values_.find(section);
  if (s == values_.end() || !s->second.count(key)) throw DomainError("config key " + section + "." + key + " missing");
  return s->second.at(key);
}

bool Config::has_value(const std::string& section, const std::string& key) const {
  return !get(section, key).empty();
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const std::string& v = get(section, key);
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(section, key, v, "a number");
  return out;
}

std::size_t Config::get_size(const std::string& section, const std::string& key) const {
  return static_cast<std::size_t>(get_u64(section, key));
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key) const {
  const std::string& v = get(section, key);
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(section, key, v, "a non-negative integer");
  return out;
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
  const std::string& v = get(section, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(section, key, v, "a boolean");
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  std::istringstream in(get(section, key));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    double d = 0.0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), d);
    if (ec != std::errc() || p != item.data() + item.size()) bad_value(section, key, item, "a number");
    out.push_back(d);
  }
  return out;
}

std::string Config::get_path(const std::string& section, const std::string& key) const {
  const std::string& v = get(section, key);
  if (v.empty()) return v;
  std::filesystem::path p(v);
  if (p.is_absolute() || base_dir_.empty()) return v;
  std::filesystem::path rel = std::filesystem::path(base_dir_) / p;
  if (std::filesystem::exists(rel) || !std::filesystem::exists(p)) return rel.string();
  return v;
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [section, keys] : values_)
    for (const auto& [key, value] : keys)
      if (!(section == "run" && key == "out")) out += section + "." + key + "=" + value + "\n";
  return out;
}

std::uint64_t Config::hash() const { return fnv1a(canonical()); }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace gatecut::cli

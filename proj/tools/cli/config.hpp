// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gatecut::cli {

// Flat INI-style run configuration:
//
//   # comment
//   [section]
//   key = value
//
// Every section/key must appear in the schema below; anything else is a
// parse error with its line number.
class Config {
 public:
  static Config defaults();
  static Config parse(const std::string& text, const std::string& source = "<config>");
  static Config read(const std::string& path);

  // "section.key=value"; the key must exist in the schema.
  void set(const std::string& dotted, const std::string& value);

  const std::string& get(const std::string& section, const std::string& key) const;
  bool has_value(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  std::size_t get_size(const std::string& section, const std::string& key) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key) const;
  std::vector<double> get_list(const std::string& section, const std::string& key) const;

  // Resolves a path value relative to the config file's directory.
  std::string get_path(const std::string& section, const std::string& key) const;

  // Every schema key except run.out with its effective value, sorted; input
  // to the hash, so the output location does not change file contents.
  std::string canonical() const;
  std::uint64_t hash() const;

  const std::string& source() const { return source_; }

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
  std::string source_ = "<defaults>";
  std::string base_dir_;
};

std::uint64_t fnv1a(const std::string& s);
std::string hex64(std::uint64_t v);

}  // namespace gatecut::cli

// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace gatecut::cli {

struct Check {
  std::string name;
  bool pass = false;
  double worst = 0.0;  // worst observed error (or violation count)
  double limit = 0.0;
  std::string detail;
};

enum class Fault { none, gamma_sign };
Fault parse_fault(const std::string& s);

struct VerifyOptions {
  std::size_t instances = 20;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  Fault fault = Fault::none;
};

std::vector<Check> run_verify(const VerifyOptions& opt);
std::string verify_table(const std::vector<Check>& checks);

}  // namespace gatecut::cli

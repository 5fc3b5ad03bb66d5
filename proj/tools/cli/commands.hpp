// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "gatecut/arch.hpp"
#include "gatecut/data.hpp"
#include "gatecut/trainer.hpp"

namespace gatecut::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kInputError = 2, kDivergence = 3, kVerifyFailed = 4 };

struct RunOptions {
  std::string command;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sweeps;     // section.key=v1,v2,...
  std::vector<std::string> overrides;  // section.key=value
  std::optional<std::string> arch;     // analyze only
  std::optional<std::string> fault;    // verify only
  bool quiet = false;
};

// Header block carried by every output file: engine version, config hash
// and seed, each line prefixed by `prefix`.
std::string header_block(const Config& cfg, const std::string& prefix = "# ");

Dataset make_dataset(const Config& cfg);
NetworkSpec make_spec(const Config& cfg, const Dataset& d);
Hyperparams make_hyper(const Config& cfg);

int cmd_train(const Config& cfg, std::ostream& log);
int cmd_analyze(const Config& cfg, const std::optional<std::string>& arch, std::ostream& log);
int cmd_odelab(const Config& cfg, std::ostream& log);
// Failing property names also go to `err`.
int cmd_verify(const Config& cfg, std::ostream& log, std::ostream& err);
int cmd_export(const Config& cfg, std::ostream& log);

// Applies overrides and sweeps, runs the command and maps errors to exit
// codes. Error messages go to `err`.
int run(const Config& base, const RunOptions& opt, std::ostream& log, std::ostream& err);

}  // namespace gatecut::cli

// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "gatecut/error.hpp"
#include "gatecut/version.hpp"

int main(int argc, char** argv) {
  using namespace gatecut::cli;
  CLI::App app{"gatecut: train, prune and analyze gated residual networks"};
  app.set_version_flag("--version", std::string("gatecut ") + gatecut::kVersion);

  RunOptions opt;
  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  std::string arch;
  std::string fault;
  app.add_option("command", opt.command, "train | analyze | odelab | verify | export")
      ->required()
      ->check(CLI::IsMember({"train", "analyze", "odelab", "verify", "export"}));
  app.add_option("-c,--config", config_path, "INI configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "overrides run.seed");
  auto* out_opt = app.add_option("-o,--out", out, "output directory (run.out)");
  app.add_option("--sweep", opt.sweeps, "section.key=v1,v2,... (repeatable; Cartesian product)");
  app.add_option("--set", opt.overrides, "section.key=value (repeatable)");
  auto* arch_opt = app.add_option("--arch", arch, "architecture file for analyze");
  auto* fault_opt = app.add_option("--fault", fault, "verify: inject a known fault (gamma_sign)");
  app.add_flag("-q,--quiet", opt.quiet, "only print errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  if (*seed_opt) opt.seed = seed;
  if (*out_opt) opt.out = out;
  if (*arch_opt) opt.arch = arch;
  if (*fault_opt) opt.fault = fault;

  Config cfg;
  try {
    cfg = config_path.empty() ? Config::defaults() : Config::read(config_path);
  } catch (const gatecut::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  std::ostringstream sink;
  std::ostream& log = opt.quiet ? static_cast<std::ostream&>(sink) : std::cout;
  return run(cfg, opt, log, std::cerr);
}

// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gatecut/trainer.hpp"

namespace gatecut {

constexpr int kCheckpointVersion = 1;

// JSON container with the architecture, weights, gates, optimizer moments,
// RNG streams, counters, metrics history and prune events. Doubles are
// written with round-trip precision, so a reload resumes bit-exactly.
// `meta` entries are stored as strings and ignored on load.
using CheckpointMeta = std::vector<std::pair<std::string, std::string>>;

std::string checkpoint_to_string(const TrainState& s, const CheckpointMeta& meta = {});
TrainState checkpoint_from_string(const std::string& text, const std::string& source = "<string>");

void save_checkpoint(const std::string& path, const TrainState& s, const CheckpointMeta& meta = {});
TrainState load_checkpoint(const std::string& path);

}  // namespace gatecut

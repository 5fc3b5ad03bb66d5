// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <functional>

namespace gatecut {

// Worker thread cap. Reads GATECUT_THREADS once; defaults to 1.
std::size_t thread_count();

// Overrides the cap for the current process (tests, benchmarks).
void set_thread_count(std::size_t n);

// Splits [0, n) into contiguous chunks, one per worker, and runs
// fn(begin, end) on each. Chunk boundaries depend only on n and the thread
// count, so work that writes disjoint outputs is reproducible.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                  std::size_t min_chunk = 1);

}  // namespace gatecut

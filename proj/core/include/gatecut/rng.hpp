// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <vector>

namespace gatecut {

// Counter-based SplitMix64. The full state is (seed, counter), so a stream
// can be saved and resumed exactly.
class Rng {
 public:
  Rng() = default;
  explicit Rng(std::uint64_t seed, std::uint64_t counter = 0) : seed_(seed), counter_(counter) {}

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller; consumes two draws per value.
  double normal();
  // Uniform on {0, ..., n-1}, unbiased. n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  // p must be in [0,1]; p == 0 never fires, p == 1 always fires.
  bool bernoulli(double p);

  // Independent child stream derived from this seed and `key`. Does not
  // advance this stream.
  Rng split(std::uint64_t key) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  bool operator==(const Rng& o) const { return seed_ == o.seed_ && counter_ == o.counter_; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Independent Bernoulli draws, one uniform per entry.
std::vector<double> bernoulli_vector(const std::vector<double>& p, Rng& rng);

}  // namespace gatecut

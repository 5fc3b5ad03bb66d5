// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gatecut/arch.hpp"
#include "gatecut/matrix.hpp"
#include "gatecut/network.hpp"
#include "gatecut/rng.hpp"

namespace gatecut {

struct Dataset {
  Matrix x;  // N x m
  Matrix y;  // N x n targets, or N x 1 class indices
  Task task = Task::regression;
  std::size_t classes = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::string provenance;

  std::size_t size() const { return x.rows(); }
};

// Throws on NaN, split overlap or out-of-range labels.
void check_dataset(const Dataset& d);

// Random disjoint split; test gets round(test_fraction * N) rows.
void split_train_test(Dataset& d, double test_fraction, Rng& rng);

enum class Standardize { none, feature, global };
Standardize parse_standardize(const std::string& s);
// Statistics come from the training rows only; zero-variance features are
// centred but not scaled.
void standardize(Dataset& d, Standardize mode);

// x ~ N(0, I), y = teacher(x) + N(0, sigma^2). With `weights` null the
// teacher's weights are drawn from rng.
Dataset gen_teacher_student(const NetworkSpec& teacher, std::size_t n, double sigma, Rng& rng,
                            const WeightSet* weights = nullptr);

// Gaussian clusters of unit variance whose centres sit on a circle of radius
// `separation` (first two coordinates; further dims are pure noise).
Dataset gen_blobs(std::size_t classes, std::size_t n, double separation, Rng& rng, std::size_t dim = 2);

// Two interleaved spirals; class k has angle 2 pi turns t + k pi, radius
// 0.1 + t for t ~ U[0,1).
Dataset gen_spirals(std::size_t n, double turns, Rng& rng, double noise = 0.0);

// IDX files (big-endian, magic 0x00000803 / 0x00000801); pixels scaled to
// [0,1]. Every sample goes to the training split.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Standard MNIST layout in `dir`: train-* files become the training split,
// t10k-* files the test split.
Dataset load_mnist(const std::string& dir);

// B indices drawn uniformly with replacement from the training split.
std::vector<std::size_t> sample_batch(const Dataset& d, std::size_t batch, Rng& rng);
void gather(const Dataset& d, const std::vector<std::size_t>& idx, Matrix& x, Matrix& y);

void export_csv(const Dataset& d, const std::string& path);

struct Moments {
  std::vector<double> x_abs;  // E|x|^k for k = 1..4 (Euclidean norm)
  std::vector<double> y_abs;  // E|y|^k for k = 1..2
};
Moments sample_moments(const Dataset& d);

}  // namespace gatecut

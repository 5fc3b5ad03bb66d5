// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include "gatecut/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>

#include "gatecut/error.hpp"

namespace gatecut {

void check_dataset(const Dataset& d) {
  if (d.x.rows() != d.y.rows()) throw ShapeError("dataset: inputs and targets differ in length");
  if (!all_finite(d.x) || !all_finite(d.y)) throw NumericError("dataset contains NaN or Inf");
  std::vector<char> seen(d.size(), 0);
  for (auto* split : {&d.train, &d.test})
    for (std::size_t i : *split) {
      if (i >= d.size()) throw ShapeError("dataset: split index out of range");
      if (seen[i]) throw ShapeError("dataset: splits overlap at row " + std::to_string(i));
      seen[i] = 1;
    }
  if (d.task == Task::classification) {
    if (d.y.cols() != 1) throw ShapeError("dataset: class targets need one column");
    for (double v : d.y.values())
      if (v < 0.0 || v >= static_cast<double>(d.classes) || v != std::floor(v))
        throw DomainError("dataset: label " + std::to_string(v) + " outside [0, " + std::to_string(d.classes) + ")");
  }
}

void split_train_test(Dataset& d, double test_fraction, Rng& rng) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw DomainError("test fraction must lie in [0,1)");
  std::vector<std::size_t> perm(d.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(d.size())));
  d.test.assign(perm.begin(), perm.begin() + static_cast<long>(n_test));
  d.train.assign(perm.begin() + static_cast<long>(n_test), perm.end());
  std::sort(d.test.begin(), d.test.end());
  std::sort(d.train.begin(), d.train.end());
}

Standardize parse_standardize(const std::string& s) {
  if (s == "none") return Standardize::none;
  if (s == "feature") return Standardize::feature;
  if (s == "global") return Standardize::global;
  throw DomainError("unknown standardization '" + s + "'");
}

void standardize(Dataset& d, Standardize mode) {
  if (mode == Standardize::none || d.train.empty()) return;
  const std::size_t m = d.x.cols();
  const double n = static_cast<double>(d.train.size());
  std::vector<double> mean(m, 0.0), sd(m, 0.0);
  for (std::size_t i : d.train)
    for (std::size_t j = 0; j < m; ++j) mean[j] += d.x(i, j);
  for (double& v : mean) v /= n;
  for (std::size_t i : d.train)
    for (std::size_t j = 0; j < m; ++j) {
      double e = d.x(i, j) - mean[j];
      sd[j] += e * e;
    }
  for (double& v : sd) v = std::sqrt(v / n);
  if (mode == Standardize::global) {
    double mu = std::accumulate(mean.begin(), mean.end(), 0.0) / static_cast<double>(m);
    double var = 0.0;
    for (std::size_t i : d.train)
      for (std::size_t j = 0; j < m; ++j) var += (d.x(i, j) - mu) * (d.x(i, j) - mu);
    double s = std::sqrt(var / (n * static_cast<double>(m)));
    std::fill(mean.begin(), mean.end(), mu);
    std::fill(sd.begin(), sd.end(), s);
  }
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double v = d.x(i, j) - mean[j];
      d.x(i, j) = sd[j] > 1e-12 ? v / sd[j] : v;
    }
}

Dataset gen_teacher_student(const NetworkSpec& teacher, std::size_t n, double sigma, Rng& rng,
                            const WeightSet* weights) {
  require_trainable(teacher);
  Rng wrng = rng.split(1);
  WeightSet w = weights ? *weights : init_weights(teacher, wrng);
  Dataset d;
  d.task = Task::regression;
  d.x = Matrix(n, teacher.input_width());
  for (double& v : d.x.values()) v = rng.normal();
  ForwardTrace tr = forward(teacher, w, GateField::ones(teacher), d.x);
  d.y = tr.y;
  if (sigma > 0.0)
    for (double& v : d.y.values()) v += sigma * rng.normal();
  d.train.resize(n);
  std::iota(d.train.begin(), d.train.end(), 0);
  d.provenance = "teacher-student sigma=" + std::to_string(sigma);
  return d;
}

Dataset gen_blobs(std::size_t classes, std::size_t n, double separation, Rng& rng, std::size_t dim) {
  if (classes < 2) throw DomainError("gen_blobs: need at least two classes");
  if (dim < 2) throw DomainError("gen_blobs: need at least two dimensions");
  Dataset d;
  d.task = Task::classification;
  d.classes = classes;
  d.x = Matrix(n, dim);
  d.y = Matrix(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = i % classes;
    double ang = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(classes);
    for (std::size_t j = 0; j < dim; ++j) d.x(i, j) = rng.normal();
    d.x(i, 0) += separation * std::cos(ang);
    d.x(i, 1) += separation * std::sin(ang);
    d.y(i, 0) = static_cast<double>(c);
  }
  d.train.resize(n);
  std::iota(d.train.begin(), d.train.end(), 0);
  d.provenance = "blobs classes=" + std::to_string(classes) + " separation=" + std::to_string(separation);
  return d;
}

Dataset gen_spirals(std::size_t n, double turns, Rng& rng, double noise) {
  Dataset d;
  d.task = Task::classification;
  d.classes = 2;
  d.x = Matrix(n, 2);
  d.y = Matrix(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = i % 2;
    double t = rng.uniform();
    double ang = 2.0 * std::numbers::pi * turns * t + std::numbers::pi * static_cast<double>(c);
    double r = 0.1 + t;
    d.x(i, 0) = r * std::cos(ang) + (noise > 0.0 ? noise * rng.normal() : 0.0);
    d.x(i, 1) = r * std::sin(ang) + (noise > 0.0 ? noise * rng.normal() : 0.0);
    d.y(i, 0) = static_cast<double>(c);
  }
  d.train.resize(n);
  std::iota(d.train.begin(), d.train.end(), 0);
  d.provenance = "spirals turns=" + std::to_string(turns);
  return d;
}

namespace {

std::vector<unsigned char> slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  return std::vector<unsigned char>((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

std::uint32_t be32(const std::vector<unsigned char>& b, std::size_t off, const std::string& path) {
  if (off + 4 > b.size())
    throw IoError(path + ": truncated at byte " + std::to_string(off) + " (file has " + std::to_string(b.size()) +
                  " bytes)");
  return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) | (std::uint32_t(b[off + 2]) << 8) |
         std::uint32_t(b[off + 3]);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  auto img = slurp(images_path);
  auto lab = slurp(labels_path);
  std::uint32_t magic = be32(img, 0, images_path);
  if (magic != 0x00000803u)
    throw IoError(images_path + ": bad magic at byte 0 (expected 0x00000803)");
  std::uint32_t n = be32(img, 4, images_path);
  std::uint32_t rows = be32(img, 8, images_path);
  std::uint32_t cols = be32(img, 12, images_path);
  std::uint32_t lmagic = be32(lab, 0, labels_path);
  if (lmagic != 0x00000801u)
    throw IoError(labels_path + ": bad magic at byte 0 (expected 0x00000801)");
  std::uint32_t ln = be32(lab, 4, labels_path);
  if (ln != n)
    throw IoError(labels_path + ": label count " + std::to_string(ln) + " at byte 4 does not match image count " +
                  std::to_string(n));
  const std::size_t m = std::size_t(rows) * cols;
  const std::size_t need = 16 + std::size_t(n) * m;
  if (img.size() < need)
    throw IoError(images_path + ": truncated at byte " + std::to_string(img.size()) + " (need " +
                  std::to_string(need) + ")");
  if (lab.size() < 8 + std::size_t(n))
    throw IoError(labels_path + ": truncated at byte " + std::to_string(lab.size()) + " (need " +
                  std::to_string(8 + std::size_t(n)) + ")");
  Dataset d;
  d.task = Task::classification;
  d.x = Matrix(n, m);
  d.y = Matrix(n, 1);
  std::size_t classes = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* p = img.data() + 16 + i * m;
    double* row = d.x.row(i);
    for (std::size_t j = 0; j < m; ++j) row[j] = static_cast<double>(p[j]) / 255.0;
    d.y(i, 0) = lab[8 + i];
    classes = std::max<std::size_t>(classes, lab[8 + i] + 1u);
  }
  d.classes = std::max<std::size_t>(classes, 10);
  d.train.resize(n);
  std::iota(d.train.begin(), d.train.end(), 0);
  d.provenance = "idx " + images_path;
  return d;
}

Dataset load_mnist(const std::string& dir) {
  Dataset tr = load_idx(dir + "/train-images-idx3-ubyte", dir + "/train-labels-idx1-ubyte");
  Dataset te = load_idx(dir + "/t10k-images-idx3-ubyte", dir + "/t10k-labels-idx1-ubyte");
  if (tr.x.cols() != te.x.cols()) throw ShapeError("mnist: train and test image sizes differ");
  Dataset d;
  d.task = Task::classification;
  d.classes = std::max(tr.classes, te.classes);
  d.x = Matrix(tr.size() + te.size(), tr.x.cols());
  d.y = Matrix(tr.size() + te.size(), 1);
  std::copy(tr.x.values().begin(), tr.x.values().end(), d.x.values().begin());
  std::copy(te.x.values().begin(), te.x.values().end(), d.x.values().begin() + static_cast<long>(tr.x.size()));
  std::copy(tr.y.values().begin(), tr.y.values().end(), d.y.values().begin());
  std::copy(te.y.values().begin(), te.y.values().end(), d.y.values().begin() + static_cast<long>(tr.y.size()));
  d.train.resize(tr.size());
  std::iota(d.train.begin(), d.train.end(), 0);
  d.test.resize(te.size());
  std::iota(d.test.begin(), d.test.end(), tr.size());
  d.provenance = "mnist " + dir;
  return d;
}

std::vector<std::size_t> sample_batch(const Dataset& d, std::size_t batch, Rng& rng) {
  if (batch == 0) throw DomainError("batch size must be >= 1");
  if (d.train.empty()) throw DomainError("training split is empty");
  std::vector<std::size_t> idx(batch);
  for (auto& i : idx) i = d.train[rng.uniform_index(d.train.size())];
  return idx;
}

void gather(const Dataset& d, const std::vector<std::size_t>& idx, Matrix& x, Matrix& y) {
  x = select_rows(d.x, idx);
  y = select_rows(d.y, idx);
}

void export_csv(const Dataset& d, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << std::setprecision(17);
  for (std::size_t j = 0; j < d.x.cols(); ++j) f << "x" << j << ",";
  for (std::size_t j = 0; j < d.y.cols(); ++j) f << (d.task == Task::classification ? "label" : "y" + std::to_string(j)) << ",";
  f << "split\n";
  std::vector<char> is_test(d.size(), 0);
  for (std::size_t i : d.test) is_test[i] = 1;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.x.cols(); ++j) f << d.x(i, j) << ",";
    for (std::size_t j = 0; j < d.y.cols(); ++j) f << d.y(i, j) << ",";
    f << (is_test[i] ? "test" : "train") << "\n";
  }
}

Moments sample_moments(const Dataset& d) {
  Moments m;
  m.x_abs.assign(4, 0.0);
  m.y_abs.assign(2, 0.0);
  const double n = static_cast<double>(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    double sx = 0.0, sy = 0.0;
    for (std::size_t j = 0; j < d.x.cols(); ++j) sx += d.x(i, j) * d.x(i, j);
    for (std::size_t j = 0; j < d.y.cols(); ++j) sy += d.y(i, j) * d.y(i, j);
    double nx = std::sqrt(sx), ny = std::sqrt(sy);
    for (int k = 0; k < 4; ++k) m.x_abs[k] += std::pow(nx, k + 1) / n;
    for (int k = 0; k < 2; ++k) m.y_abs[k] += std::pow(ny, k + 1) / n;
  }
  return m;
}

}  // namespace gatecut

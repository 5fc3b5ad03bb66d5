// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include "gatecut/matrix.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "gatecut/error.hpp"
#include "gatecut/parallel.hpp"

namespace gatecut {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Stride = Eigen::OuterStride<>;
using CMap = Eigen::Map<const RowMat, 0, Stride>;
using MMap = Eigen::Map<RowMat, 0, Stride>;

// Below this many multiply-adds a kernel runs on the calling thread.
constexpr std::size_t kParallelWork = 1u << 18;
constexpr std::size_t kMinRows = 16;

std::string shapes(const char* op, const Matrix& a, const Matrix& b) {
  return std::string(op) + ": incompatible shapes " + a.shape() + " and " + b.shape();
}

void check_result(const Matrix& m, const char* op) {
  if (!all_finite(m)) throw NumericError(std::string(op) + ": non-finite result " + m.shape());
}

template <typename Fn>
void row_split(std::size_t rows, std::size_t work, Fn&& fn) {
  if (work < kParallelWork || thread_count() <= 1) {
    fn(0, rows);
    return;
  }
  parallel_for(rows, fn, kMinRows);
}

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("ragged initializer list");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column(const std::vector<double>& v) {
  Matrix m(v.size(), 1);
  std::copy(v.begin(), v.end(), m.data());
  return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::string Matrix::shape() const {
  return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeError(shapes("matmul", a, b));
  Matrix c(a.rows(), b.cols());
  if (c.empty()) return c;
  CMap B(b.data(), b.rows(), b.cols(), Stride(b.cols()));
  row_split(a.rows(), a.rows() * a.cols() * b.cols(), [&](std::size_t r0, std::size_t r1) {
    CMap A(a.row(r0), r1 - r0, a.cols(), Stride(a.cols()));
    MMap C(c.row(r0), r1 - r0, c.cols(), Stride(c.cols()));
    C.noalias() = A * B;
  });
  check_result(c, "matmul");
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ShapeError(shapes("matmul_nt", a, b));
  Matrix c(a.rows(), b.rows());
  if (c.empty()) return c;
  CMap B(b.data(), b.rows(), b.cols(), Stride(b.cols()));
  row_split(a.rows(), a.rows() * a.cols() * b.rows(), [&](std::size_t r0, std::size_t r1) {
    CMap A(a.row(r0), r1 - r0, a.cols(), Stride(a.cols()));
    MMap C(c.row(r0), r1 - r0, c.cols(), Stride(c.cols()));
    C.noalias() = A * B.transpose();
  });
  check_result(c, "matmul_nt");
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError(shapes("matmul_tn", a, b));
  Matrix c(a.cols(), b.cols());
  if (c.empty()) return c;
  CMap B(b.data(), b.rows(), b.cols(), Stride(b.cols()));
  row_split(a.cols(), a.rows() * a.cols() * b.cols(), [&](std::size_t r0, std::size_t r1) {
    // Column block [r0, r1) of a, as a (a.rows x (r1-r0)) view.
    CMap A(a.data() + r0, a.rows(), r1 - r0, Stride(a.cols()));
    MMap C(c.row(r0), r1 - r0, c.cols(), Stride(c.cols()));
    C.noalias() = A.transpose() * B;
  });
  check_result(c, "matmul_tn");
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError(shapes("add", a, b));
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] += b.data()[i];
  return c;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError(shapes("sub", a, b));
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

Matrix scale(const Matrix& a, double s) {
  Matrix c = a;
  for (double& v : c.values()) v *= s;
  return c;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError(shapes("hadamard", a, b));
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] *= b.data()[i];
  return c;
}

void axpy(double s, const Matrix& a, Matrix& out) {
  if (a.rows() != out.rows() || a.cols() != out.cols()) throw ShapeError(shapes("axpy", a, out));
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] += s * a.data()[i];
}

double frobenius_sq(const Matrix& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return s;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError(shapes("max_abs_diff", a, b));
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

bool all_finite(const Matrix& a) {
  for (double v : a.values())
    if (!std::isfinite(v)) return false;
  return true;
}

void require_finite(const Matrix& a, const std::string& what) {
  if (!all_finite(a)) throw NumericError(what + ": non-finite value in " + a.shape());
}

Matrix select_rows(const Matrix& a, const std::vector<std::size_t>& rows) {
  Matrix out(rows.size(), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= a.rows()) throw ShapeError("select_rows: index out of range");
    std::copy(a.row(rows[i]), a.row(rows[i]) + a.cols(), out.row(i));
  }
  return out;
}

Matrix select_cols(const Matrix& a, const std::vector<std::size_t>& cols) {
  Matrix out(a.rows(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    if (cols[j] >= a.cols()) throw ShapeError("select_cols: index out of range");
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = a(i, cols[j]);
  return out;
}

}  // namespace gatecut

// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <functional>
#include <vector>

namespace gatecut {

using ScalarFn = std::function<double(const std::vector<double>&)>;

// Central differences (f(x+h e_i) - f(x-h e_i)) / 2h for every coordinate.
// Throws NumericError if f returns a non-finite value.
std::vector<double> finite_diff_grad(const ScalarFn& f, const std::vector<double>& x, double h = 1e-4);

// max_i |a_i - b_i| / max(|b_i|, floor)
double max_rel_error(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-8);

}  // namespace gatecut

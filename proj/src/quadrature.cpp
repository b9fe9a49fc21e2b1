// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdbem/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tdbem {

namespace {

constexpr int kMaxGaussOrder = 64;

// Newton iteration on the Legendre polynomial, mapped from [-1, 1] to [0, 1].
QuadratureRule compute_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes(i) = 0.5 * (1.0 - x);
    rule.nodes(n - 1 - i) = 0.5 * (1.0 + x);
    rule.weights(i) = 0.5 * w;
    rule.weights(n - 1 - i) = 0.5 * w;
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(int order) {
  if (order < 1 || order > kMaxGaussOrder) {
    throw std::invalid_argument("Gauss-Legendre order out of range");
  }
  static const std::array<QuadratureRule, kMaxGaussOrder> rules = [] {
    std::array<QuadratureRule, kMaxGaussOrder> table;
    for (int n = 1; n <= kMaxGaussOrder; ++n) table[n - 1] = compute_gauss_legendre(n);
    return table;
  }();
  return rules[order - 1];
}

QuadratureRule graded_rule(int order, int levels, double sigma) {
  const QuadratureRule& base = gauss_legendre(order);
  QuadratureRule rule;
  rule.nodes.resize(order * (levels + 1));
  rule.weights.resize(order * (levels + 1));
  double hi = 1.0;
  Eigen::Index k = 0;
  for (int level = 0; level <= levels; ++level) {
    const double lo = level == levels ? 0.0 : hi * sigma;
    for (int i = 0; i < order; ++i, ++k) {
      rule.nodes(k) = lo + (hi - lo) * base.nodes(i);
      rule.weights(k) = (hi - lo) * base.weights(i);
    }
    hi = lo;
  }
  return rule;
}

}  // namespace tdbem

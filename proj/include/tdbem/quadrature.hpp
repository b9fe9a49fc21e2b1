// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

namespace tdbem {

/// Nodes and weights of a one-dimensional rule on [0, 1].
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return nodes.size(); }

  template <typename F>
  auto integrate(F&& f) const {
    auto sum = weights(0) * f(nodes(0));
    for (Eigen::Index i = 1; i < nodes.size(); ++i) sum += weights(i) * f(nodes(i));
    return sum;
  }
};

/// Gauss-Legendre rule with `order` points on [0, 1] (1 <= order <= 64).
/// Rules are computed once and shared.
const QuadratureRule& gauss_legendre(int order);

/// Composite Gauss rule geometrically graded towards 0: intervals
/// [sigma^{j+1}, sigma^j] for j < levels plus [0, sigma^levels], each carrying
/// an `order`-point Gauss rule. Integrates endpoint singularities of log and
/// algebraic type at 0 with exponential convergence in `levels`.
QuadratureRule graded_rule(int order, int levels, double sigma = 0.15);

}  // namespace tdbem

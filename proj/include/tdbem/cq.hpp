// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "tdbem/special_functions.hpp"

namespace tdbem {

/// Invalid time-grid parameters.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// BDF2 symbol (3/2 - 2 zeta + zeta^2 / 2) / k.
inline Complex bdf2_delta(Complex zeta, double k) {
  return (1.5 - 2.0 * zeta + 0.5 * zeta * zeta) / k;
}

/// Time grid t_n = n k, n = 0..M, and the Laplace frequencies of the
/// all-steps-at-once algorithm. frequencies[l] = delta(lambda e^{-2 pi i l / N_f})
/// matches the sign of forward_transform.
struct CQGrid {
  double T = 0.0;
  double k = 0.0;
  int M = 0;
  int n_freq = 0;
  double lambda = 0.0;
  std::vector<Complex> frequencies;

  /// Frequencies l = 0..n_freq/2 are solved, the rest follow by conjugation.
  int retained() const { return n_freq / 2 + 1; }
  double time(int n) const { return n * k; }
};

/// k = T/M, N_f = M + 1, lambda = eps^(1/(2 N_f)). Throws ParameterError for
/// M < 2, T <= 0, or lambda^M below 1e-300.
CQGrid make_grid(double T, int M, double eps = 1e-14);

/// Rows are time steps n = 0..M, columns are independent series.
/// Returns ghat(l, :) = sum_n g(n, :) lambda^n e^{-2 pi i l n / N_f}.
Eigen::MatrixXcd forward_transform(const Eigen::Ref<const Eigen::MatrixXd>& series,
                                   const CQGrid& grid);

/// u(n, :) = Re[lambda^-n / N_f sum_l uhat(l, :) e^{2 pi i l n / N_f}].
/// `imaginary_residual`, if given, receives max|Im| / max|Re| of the result.
Eigen::MatrixXd inverse_transform(const Eigen::Ref<const Eigen::MatrixXcd>& spectra,
                                  const CQGrid& grid, double* imaginary_residual = nullptr);

/// Imaginary residual above which inverse_transform output signals a
/// broken conjugate symmetry upstream.
inline constexpr double kImaginaryResidualWarning = 1e-6;

/// Fill rows l > n_freq/2 of a spectrum by conjugating row n_freq - l.
void conjugate_fill(Eigen::MatrixXcd& spectra, const CQGrid& grid);

/// Taylor coefficients omega_0..omega_count of zeta -> F(delta(zeta)) by a
/// trapezoidal Cauchy integral on |zeta| = 10^(-2/count) with
/// max(8 count, 32) points. F may return a scalar or an Eigen matrix.
template <typename F>
auto cq_weights_direct(F&& f, const CQGrid& grid, int count) {
  using Result = std::decay_t<decltype(f(Complex{}))>;
  if (count < 0 || count > 32) throw ParameterError("weight count must be in [0, 32]");
  const int points = std::max(8 * count, 32);
  const double rho = std::pow(10.0, -2.0 / std::max(count, 1));
  std::vector<Result> weights;
  for (int p = 0; p < points; ++p) {
    const double angle = 2.0 * std::numbers::pi * p / points;
    const Result value = f(bdf2_delta(std::polar(rho, angle), grid.k));
    if (weights.empty()) weights.assign(count + 1, Result(value * 0.0));
    for (int j = 0; j <= count; ++j) {
      const Complex factor = std::polar(std::pow(rho, -j) / points, -angle * j);
      weights[j] += value * factor;
    }
  }
  return weights;
}

}  // namespace tdbem

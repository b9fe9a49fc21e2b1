// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdbem/cq.hpp"

#include <algorithm>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace tdbem {

CQGrid make_grid(double T, int M, double eps) {
  if (M < 2) throw ParameterError("at least two time steps are required");
  if (!(T > 0.0)) throw ParameterError("final time must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("contour tolerance must lie in (0, 1)");
  CQGrid g;
  g.T = T;
  g.M = M;
  g.k = T / M;
  g.n_freq = M + 1;
  g.lambda = std::pow(eps, 1.0 / (2.0 * g.n_freq));
  if (M * std::log10(g.lambda) < -300.0) {
    throw ParameterError("contour radius underflows: lambda^M < 1e-300");
  }
  g.frequencies.resize(g.n_freq);
  for (int l = 0; l < g.n_freq; ++l) {
    const Complex zeta = std::polar(g.lambda, -2.0 * std::numbers::pi * l / g.n_freq);
    g.frequencies[l] = bdf2_delta(zeta, g.k);
  }
  return g;
}

Eigen::MatrixXcd forward_transform(const Eigen::Ref<const Eigen::MatrixXd>& series,
                                   const CQGrid& grid) {
  if (series.rows() != grid.M + 1) throw ParameterError("series length must be M + 1");
  const int n = grid.n_freq;
  Eigen::MatrixXcd out(n, series.cols());
  Eigen::FFT<double> fft;
  std::vector<Complex> in(n);
  std::vector<Complex> res(n);
  for (Eigen::Index c = 0; c < series.cols(); ++c) {
    double scale = 1.0;
    for (int t = 0; t < n; ++t) {
      in[t] = series(t, c) * scale;
      scale *= grid.lambda;
    }
    fft.fwd(res.data(), in.data(), n);
    for (int l = 0; l < n; ++l) out(l, c) = res[l];
  }
  return out;
}

Eigen::MatrixXd inverse_transform(const Eigen::Ref<const Eigen::MatrixXcd>& spectra,
                                  const CQGrid& grid, double* imaginary_residual) {
  if (spectra.rows() != grid.n_freq) throw ParameterError("spectrum length must be N_f");
  const int n = grid.n_freq;
  Eigen::MatrixXd out(grid.M + 1, spectra.cols());
  Eigen::FFT<double> fft;
  std::vector<Complex> in(n);
  std::vector<Complex> res(n);
  double max_re = 0.0;
  double max_im = 0.0;
  for (Eigen::Index c = 0; c < spectra.cols(); ++c) {
    for (int l = 0; l < n; ++l) in[l] = spectra(l, c);
    fft.inv(res.data(), in.data(), n);
    double scale = 1.0;
    for (int t = 0; t <= grid.M; ++t) {
      const Complex u = res[t] * scale;
      out(t, c) = u.real();
      max_re = std::max(max_re, std::abs(u.real()));
      max_im = std::max(max_im, std::abs(u.imag()));
      scale /= grid.lambda;
    }
  }
  if (imaginary_residual) *imaginary_residual = max_re > 0.0 ? max_im / max_re : max_im;
  return out;
}

void conjugate_fill(Eigen::MatrixXcd& spectra, const CQGrid& grid) {
  for (int l = grid.retained(); l < grid.n_freq; ++l) {
    spectra.row(l) = spectra.row(grid.n_freq - l).conjugate();
  }
}

}  // namespace tdbem

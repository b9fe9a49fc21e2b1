// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include <Eigen/Core>

#include "tdbem/cq.hpp"
#include "tdbem/geometry.hpp"

namespace tdbem {

/// 0 below 0, 1 above 1, x^5 (126 - 420x + 540x^2 - 315x^3 + 70x^4) between;
/// four continuous derivatives at both junctions.
double smoothstep(double x);
double smoothstep_derivative(double x);

enum class PulseShape {
  windowed_sine,  ///< f(theta) = sin(theta) h(theta)
  bump,           ///< f(theta) = h(theta / w) h(2 - theta / w), support [0, 2w]
};

/// u(x, t) = amplitude f(speed (t - delay) - x . direction).
struct PlaneWavePulse {
  double speed = 1.0;
  Eigen::Vector2d direction = Eigen::Vector2d(1.0, 0.0);
  double delay = 0.0;
  double amplitude = 1.0;
  PulseShape shape = PulseShape::windowed_sine;
  double width = 1.0;

  double phase(const Point& x, double t) const;
  double profile(double theta) const;
  double profile_derivative(double theta) const;
};

double wave_value(const PlaneWavePulse& p, const Point& x, double t);
Eigen::Vector2d wave_gradient(const PlaneWavePulse& p, const Point& x, double t);

/// beta0 = trace at the P1 nodes, beta1 = flux_scale * normal derivative at
/// panel midpoints.
struct BoundaryData {
  Eigen::VectorXd beta0;
  Eigen::VectorXd beta1;
};
BoundaryData boundary_data(const PlaneWavePulse& p, const Mesh& mesh, double flux_scale, double t);

/// Boundary data at every time step of a grid; rows are time steps.
struct BoundaryDataSeries {
  Eigen::MatrixXd beta0;
  Eigen::MatrixXd beta1;
};
BoundaryDataSeries boundary_data_series(const PlaneWavePulse& p, const Mesh& mesh,
                                        double flux_scale, const CQGrid& grid);

enum class ErrorNorm {
  nodal_max,  ///< max over midpoints / P1 nodes
  l2,         ///< exact L2(Gamma) norm of the piecewise polynomial difference
};

/// Absolute and relative errors at one time. lambda is compared with the
/// P0 interpolant of the interior normal derivative, phi with the P1
/// interpolant of the trace, field values with the exact wave at the
/// observation points.
struct ErrorMetrics {
  double e_lambda = 0.0;
  double e_phi = 0.0;
  double e_u = 0.0;
  double rel_lambda = 0.0;
  double rel_phi = 0.0;
  double rel_u = 0.0;
  bool guarded = false;  ///< an exact norm vanished; the relative value is absolute
};
ErrorMetrics error_metrics(const Eigen::VectorXd& lambda, const Eigen::VectorXd& phi,
                           const Eigen::VectorXd& u_obs, const PlaneWavePulse& exact,
                           const Mesh& mesh, std::span<const Point> observation, double t,
                           ErrorNorm norm);

/// Norm of a P0 (panel values) or P1 (node values) function on the mesh.
double p0_norm(const Eigen::VectorXd& values, const Mesh& mesh, ErrorNorm norm);
double p1_norm(const Eigen::VectorXd& values, const Mesh& mesh, ErrorNorm norm);

/// log(e_coarse / e_fine) / log(n_fine / n_coarse).
double ecr(double e_coarse, double e_fine, double n_coarse, double n_fine);

}  // namespace tdbem

// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdbem/analytic_data.hpp"

#include <cmath>
#include <stdexcept>

namespace tdbem {

double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double x5 = x * x * x * x * x;
  return x5 * (126.0 + x * (-420.0 + x * (540.0 + x * (-315.0 + x * 70.0))));
}

double smoothstep_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double a = x * (1.0 - x);
  return 630.0 * a * a * a * a;
}

double PlaneWavePulse::phase(const Point& x, double t) const {
  return speed * (t - delay) - x.dot(direction);
}

double PlaneWavePulse::profile(double theta) const {
  switch (shape) {
    case PulseShape::windowed_sine:
      return std::sin(theta) * smoothstep(theta);
    case PulseShape::bump:
      return smoothstep(theta / width) * smoothstep(2.0 - theta / width);
  }
  return 0.0;
}

double PlaneWavePulse::profile_derivative(double theta) const {
  switch (shape) {
    case PulseShape::windowed_sine:
      return std::cos(theta) * smoothstep(theta) + std::sin(theta) * smoothstep_derivative(theta);
    case PulseShape::bump: {
      const double a = theta / width;
      return (smoothstep_derivative(a) * smoothstep(2.0 - a) -
              smoothstep(a) * smoothstep_derivative(2.0 - a)) /
             width;
    }
  }
  return 0.0;
}

double wave_value(const PlaneWavePulse& p, const Point& x, double t) {
  return p.amplitude * p.profile(p.phase(x, t));
}

Eigen::Vector2d wave_gradient(const PlaneWavePulse& p, const Point& x, double t) {
  return -p.amplitude * p.profile_derivative(p.phase(x, t)) * p.direction;
}

BoundaryData boundary_data(const PlaneWavePulse& p, const Mesh& mesh, double flux_scale, double t) {
  BoundaryData d;
  const int n = mesh.size();
  d.beta0.resize(n);
  d.beta1.resize(n);
  for (int i = 0; i < n; ++i) {
    d.beta0(i) = wave_value(p, mesh.nodes().col(i), t);
    d.beta1(i) = flux_scale * wave_gradient(p, mesh.midpoints().col(i), t).dot(mesh.normals().col(i));
  }
  return d;
}

BoundaryDataSeries boundary_data_series(const PlaneWavePulse& p, const Mesh& mesh,
                                        double flux_scale, const CQGrid& grid) {
  BoundaryDataSeries s;
  s.beta0.resize(grid.M + 1, mesh.size());
  s.beta1.resize(grid.M + 1, mesh.size());
  for (int n = 0; n <= grid.M; ++n) {
    const BoundaryData d = boundary_data(p, mesh, flux_scale, grid.time(n));
    s.beta0.row(n) = d.beta0.transpose();
    s.beta1.row(n) = d.beta1.transpose();
  }
  return s;
}

double p0_norm(const Eigen::VectorXd& values, const Mesh& mesh, ErrorNorm norm) {
  if (norm == ErrorNorm::nodal_max) return values.cwiseAbs().maxCoeff();
  return std::sqrt(mesh.lengths().dot(values.cwiseAbs2()));
}

double p1_norm(const Eigen::VectorXd& values, const Mesh& mesh, ErrorNorm norm) {
  if (norm == ErrorNorm::nodal_max) return values.cwiseAbs().maxCoeff();
  double sum = 0.0;
  for (const Cell& c : mesh.cells()) {
    const double a = c.value_start[0] * values(c.nodes[0]) + c.value_start[1] * values(c.nodes[1]);
    const double b = c.value_end[0] * values(c.nodes[0]) + c.value_end[1] * values(c.nodes[1]);
    sum += c.length / 3.0 * (a * a + a * b + b * b);
  }
  return std::sqrt(sum);
}

ErrorMetrics error_metrics(const Eigen::VectorXd& lambda, const Eigen::VectorXd& phi,
                           const Eigen::VectorXd& u_obs, const PlaneWavePulse& exact,
                           const Mesh& mesh, std::span<const Point> observation, double t,
                           ErrorNorm norm) {
  const BoundaryData d = boundary_data(exact, mesh, 1.0, t);
  if (lambda.size() != d.beta1.size() || phi.size() != d.beta0.size() ||
      u_obs.size() != static_cast<Eigen::Index>(observation.size())) {
    throw std::invalid_argument("error_metrics: dimension mismatch");
  }
  ErrorMetrics m;
  m.e_lambda = p0_norm(lambda - d.beta1, mesh, norm);
  m.e_phi = p1_norm(phi - d.beta0, mesh, norm);
  double u_norm = 0.0;
  for (std::size_t i = 0; i < observation.size(); ++i) {
    const double u = wave_value(exact, observation[i], t);
    m.e_u = std::max(m.e_u, std::abs(u_obs(i) - u));
    u_norm = std::max(u_norm, std::abs(u));
  }
  auto relative = [&m](double e, double ref) {
    if (ref > 0.0) return e / ref;
    m.guarded = true;
    return e;
  };
  m.rel_lambda = relative(m.e_lambda, p0_norm(d.beta1, mesh, norm));
  m.rel_phi = relative(m.e_phi, p1_norm(d.beta0, mesh, norm));
  m.rel_u = relative(m.e_u, u_norm);
  return m;
}

double ecr(double e_coarse, double e_fine, double n_coarse, double n_fine) {
  if (!(e_coarse > 0.0 && e_fine > 0.0 && n_coarse > 0.0 && n_fine > n_coarse)) {
    throw std::invalid_argument("ecr needs positive errors and n_fine > n_coarse");
  }
  return std::log(e_coarse / e_fine) / std::log(n_fine / n_coarse);
}

}  // namespace tdbem

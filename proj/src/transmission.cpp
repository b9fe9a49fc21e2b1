// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdbem/transmission.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tdbem {

double MaterialParams::m() const { return c * std::sqrt(kappa); }

void MaterialParams::validate() const {
  if (!(kappa > 0.0) || !(c > 0.0)) throw ConfigError("material parameters must be positive");
}

TransmissionProblem::TransmissionProblem(std::vector<Obstacle> obstacles, AssemblyOptions options,
                                         RhsScaling scaling)
    : obstacles_(std::move(obstacles)), options_(options), scaling_(scaling) {
  if (obstacles_.empty()) throw ConfigError("at least one obstacle is required");
  unknown_offsets_.push_back(0);
  data_offsets_.push_back(0);
  for (const Obstacle& o : obstacles_) {
    o.material.validate();
    unknown_offsets_.push_back(unknown_offsets_.back() + o.mesh.spaces().dim_x + o.mesh.spaces().dim_y);
    data_offsets_.push_back(data_offsets_.back() + o.mesh.size());
  }
  // Meshes live in obstacles_, which is not resized from here on.
  for (const Obstacle& o : obstacles_) self_.push_back(std::make_unique<Assembler>(o.mesh, options_));
  for (std::size_t i = 0; i < obstacles_.size(); ++i) {
    for (std::size_t j = i + 1; j < obstacles_.size(); ++j) {
      cross_.push_back(std::make_unique<Assembler>(obstacles_[i].mesh, obstacles_[j].mesh, options_));
    }
  }
}

BlockSystem TransmissionProblem::assemble(Complex s) const {
  const int n_obs = static_cast<int>(obstacles_.size());
  BlockSystem sys;
  sys.s = s;
  sys.matrix = Eigen::MatrixXcd::Zero(unknowns(), unknowns());
  sys.rhs_beta0 = Eigen::MatrixXcd::Zero(unknowns(), data_size());
  sys.rhs_beta1 = Eigen::MatrixXcd::Zero(unknowns(), data_size());

  std::vector<OperatorSet> exterior(n_obs);
  for (int i = 0; i < n_obs; ++i) {
    const Obstacle& o = obstacles_[i];
    const int n = o.mesh.size();
    const int r1 = unknown_offsets_[i];
    const int r2 = r1 + n;
    const int d = data_offsets_[i];
    const double kappa = o.material.kappa;
    const double m = o.material.m();
    const OperatorSet interior = self_[i]->assemble(s / m);
    exterior[i] = m == 1.0 ? interior : self_[i]->assemble(s);

    sys.matrix.block(r1, r1, n, n) += interior.V;
    sys.matrix.block(r1, r2, n, n) -= interior.K;
    sys.matrix.block(r2, r1, n, n) += interior.J;
    sys.matrix.block(r2, r2, n, n) += interior.W;

    const MixedMass mass = mixed_mass(o.mesh);
    const double f0 = scaling_ == RhsScaling::consistent ? 0.5 : 0.5 / kappa;
    const double f1 = scaling_ == RhsScaling::consistent ? 0.5 / kappa : 0.5;
    sys.rhs_beta0.block(r1, d, n, n) += f0 * mass.x_on_y.cast<Complex>();
    sys.rhs_beta1.block(r2, d, n, n) += f1 * mass.y_on_x.cast<Complex>();
  }

  auto couple = [&](int i, int j, const Eigen::MatrixXcd& V, const Eigen::MatrixXcd& K,
                    const Eigen::MatrixXcd& J, const Eigen::MatrixXcd& W) {
    const int ni = obstacles_[i].mesh.size();
    const int nj = obstacles_[j].mesh.size();
    const int r1 = unknown_offsets_[i];
    const int r2 = r1 + ni;
    const int c1 = unknown_offsets_[j];
    const int c2 = c1 + nj;
    const int d = data_offsets_[j];
    const double ki = obstacles_[i].material.kappa;
    const double kj = obstacles_[j].material.kappa;
    sys.matrix.block(r1, c1, ni, nj) += kj * V;
    sys.matrix.block(r1, c2, ni, nj) -= K;
    sys.matrix.block(r2, c1, ni, nj) += (kj / ki) * J;
    sys.matrix.block(r2, c2, ni, nj) += W / ki;
    sys.rhs_beta1.block(r1, d, ni, nj) += V;
    sys.rhs_beta0.block(r1, d, ni, nj) -= K;
    sys.rhs_beta1.block(r2, d, ni, nj) += J / ki;
    sys.rhs_beta0.block(r2, d, ni, nj) += W / ki;
  };

  for (int i = 0; i < n_obs; ++i) couple(i, i, exterior[i].V, exterior[i].K, exterior[i].J, exterior[i].W);
  int idx = 0;
  for (int i = 0; i < n_obs; ++i) {
    for (int j = i + 1; j < n_obs; ++j, ++idx) {
      const OperatorSet o = cross_[idx]->assemble(s);
      couple(i, j, o.V, o.K, o.J, o.W);
      couple(j, i, o.V.transpose(), o.J.transpose(), o.K.transpose(), o.W.transpose());
    }
  }
  return sys;
}

std::vector<Region> TransmissionProblem::locate(std::span<const Point> points) const {
  std::vector<Boundary> boundaries;
  for (const Obstacle& o : obstacles_) boundaries.push_back(o.mesh.boundary());
  std::vector<Region> out;
  out.reserve(points.size());
  for (const Point& p : points) out.push_back(locate_point(p, boundaries));
  return out;
}

Eigen::VectorXcd TransmissionProblem::field(Complex s, const Eigen::VectorXcd& x,
                                            const Eigen::VectorXcd& beta0,
                                            const Eigen::VectorXcd& beta1,
                                            std::span<const Point> points,
                                            std::span<const Region> regions) const {
  const int n_obs = static_cast<int>(obstacles_.size());
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(points.size()));
  for (int group = Region::kExterior; group < n_obs; ++group) {
    std::vector<Point> pts;
    std::vector<Eigen::Index> idx;
    for (std::size_t p = 0; p < points.size(); ++p) {
      if (regions[p].obstacle == group) {
        pts.push_back(points[p]);
        idx.push_back(static_cast<Eigen::Index>(p));
      }
    }
    if (pts.empty()) continue;
    Eigen::VectorXcd values = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(pts.size()));
    for (int j = 0; j < n_obs; ++j) {
      if (group != Region::kExterior && group != j) continue;
      const Obstacle& o = obstacles_[j];
      const int n = o.mesh.size();
      const auto lambda = x.segment(unknown_offsets_[j], n);
      const auto phi = x.segment(unknown_offsets_[j] + n, n);
      if (group == j) {
        const PotentialPair pot = potential_matrices(s / o.material.m(), o.mesh, pts, options_);
        values += pot.S * lambda - pot.D * phi;
      } else {
        const auto b0 = beta0.segment(data_offsets_[j], n);
        const auto b1 = beta1.segment(data_offsets_[j], n);
        const PotentialPair pot = potential_matrices(s, o.mesh, pts, options_);
        values += -(pot.S * (o.material.kappa * lambda - b1)) + pot.D * (phi - b0);
      }
    }
    for (std::size_t p = 0; p < idx.size(); ++p) out(idx[p]) = values(static_cast<Eigen::Index>(p));
  }
  return out;
}

BlockSystem assemble_block(Complex s, const Mesh& mesh, const MaterialParams& mat,
                           const AssemblyOptions& options) {
  return TransmissionProblem({Obstacle{mesh, mat}}, options).assemble(s);
}

Eigen::VectorXcd assemble_rhs_hat(Complex s, const Mesh& mesh, const MaterialParams& mat,
                                  const Eigen::VectorXcd& beta0, const Eigen::VectorXcd& beta1,
                                  RhsScaling scaling, const AssemblyOptions& options) {
  if (beta0.size() != mesh.spaces().dim_y || beta1.size() != mesh.spaces().dim_x) {
    throw std::invalid_argument("data vectors do not match the trace spaces");
  }
  const BlockSystem sys = TransmissionProblem({Obstacle{mesh, mat}}, options, scaling).assemble(s);
  return sys.rhs_beta0 * beta0 + sys.rhs_beta1 * beta1;
}

namespace {

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

}  // namespace

DensityHistory solve_history(const TransmissionProblem& problem, const Eigen::MatrixXd& beta0,
                             const Eigen::MatrixXd& beta1, const CQGrid& grid,
                             std::span<const Point> observation, const SolveOptions& options) {
  if (beta0.rows() != grid.M + 1 || beta1.rows() != grid.M + 1 ||
      beta0.cols() != problem.data_size() || beta1.cols() != problem.data_size()) {
    throw std::invalid_argument("data series do not match the grid and trace spaces");
  }
  set_threads(options.threads);
  const Eigen::MatrixXcd b0 = forward_transform(beta0, grid);
  const Eigen::MatrixXcd b1 = forward_transform(beta1, grid);
  const int n_points = static_cast<int>(observation.size());

  DensityHistory h;
  h.regions = problem.locate(observation);
  Eigen::MatrixXcd x_hat = Eigen::MatrixXcd::Zero(grid.n_freq, problem.unknowns());
  Eigen::MatrixXcd f_hat = Eigen::MatrixXcd::Zero(grid.n_freq, n_points);

  const int retained = grid.retained();
  std::string failure;
  int failed_index = -1;
#pragma omp parallel for schedule(dynamic, 1)
  for (int l = 0; l < retained; ++l) {
    const Complex s = grid.frequencies[l];
    const Eigen::VectorXcd d0 = b0.row(l).transpose();
    const Eigen::VectorXcd d1 = b1.row(l).transpose();
    if (d0.isZero(0.0) && d1.isZero(0.0)) continue;
    try {
      const BlockSystem sys = problem.assemble(s);
      const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.matrix);
      const Eigen::VectorXcd x = lu.solve(sys.rhs_beta0 * d0 + sys.rhs_beta1 * d1);
      if (!x.allFinite() || !(lu.rcond() > 1e-15)) {
        throw SolveError("singular block system", l, s);
      }
      x_hat.row(l) = x.transpose();
      if (n_points > 0) {
        f_hat.row(l) = problem.field(s, x, d0, d1, observation, h.regions).transpose();
      }
    } catch (const std::exception& e) {
#pragma omp critical
      {
        if (failed_index < 0 || l < failed_index) {
          failed_index = l;
          failure = e.what();
        }
      }
    }
  }
  if (failed_index >= 0) {
    throw SolveError("frequency " + std::to_string(failed_index) + " (s = " +
                         std::to_string(grid.frequencies[failed_index].real()) + " + " +
                         std::to_string(grid.frequencies[failed_index].imag()) + "i): " + failure,
                     failed_index, grid.frequencies[failed_index]);
  }

  conjugate_fill(x_hat, grid);
  conjugate_fill(f_hat, grid);
  double r1 = 0.0;
  double r2 = 0.0;
  const Eigen::MatrixXd x = inverse_transform(x_hat, grid, &r1);
  h.field = inverse_transform(f_hat, grid, &r2);
  h.imaginary_residual = std::max(r1, r2);
  h.symmetry_warning = h.imaginary_residual > kImaginaryResidualWarning;

  const int n_obs = static_cast<int>(problem.obstacles().size());
  h.lambda.resize(grid.M + 1, problem.data_size());
  h.phi.resize(grid.M + 1, problem.data_size());
  for (int i = 0; i < n_obs; ++i) {
    const int n = problem.obstacles()[i].mesh.size();
    const int u = problem.unknown_offsets()[i];
    const int d = problem.data_offsets()[i];
    h.lambda.middleCols(d, n) = x.middleCols(u, n);
    h.phi.middleCols(d, n) = x.middleCols(u + n, n);
  }
  if (options.cache_spectra) {
    h.solution_spectra = std::move(x_hat);
    h.beta0_spectra = b0;
    h.beta1_spectra = b1;
  }
  return h;
}

Eigen::MatrixXd field_history(const TransmissionProblem& problem, const DensityHistory& history,
                              const CQGrid& grid, std::span<const Point> points,
                              std::span<const Region> regions, const SolveOptions& options) {
  if (history.solution_spectra.rows() != grid.n_freq) {
    throw std::invalid_argument("field_history needs a solve with cached spectra");
  }
  set_threads(options.threads);
  Eigen::MatrixXcd f_hat = Eigen::MatrixXcd::Zero(grid.n_freq, static_cast<Eigen::Index>(points.size()));
  const int retained = grid.retained();
#pragma omp parallel for schedule(dynamic, 1)
  for (int l = 0; l < retained; ++l) {
    const Eigen::VectorXcd x = history.solution_spectra.row(l).transpose();
    if (x.isZero(0.0)) continue;
    f_hat.row(l) = problem
                       .field(grid.frequencies[l], x, history.beta0_spectra.row(l).transpose(),
                              history.beta1_spectra.row(l).transpose(), points, regions)
                       .transpose();
  }
  conjugate_fill(f_hat, grid);
  return inverse_transform(f_hat, grid);
}

}  // namespace tdbem

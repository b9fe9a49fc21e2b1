// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "tdbem/cq.hpp"
#include "tdbem/geometry.hpp"
#include "tdbem/helmholtz_ops.hpp"

namespace tdbem {

/// Interior contrast kappa and speed parameter c; interior operators run at
/// speed m = c sqrt(kappa).
struct MaterialParams {
  double kappa = 1.0;
  double c = 1.0;

  double m() const;
  void validate() const;
};

struct Obstacle {
  Mesh mesh;
  MaterialParams material;
};

/// Placement of the identity terms in the right-hand side.
enum class RhsScaling {
  /// 1/2 beta0 (first row), 1/(2 kappa) beta1 (second row); consistent with
  /// the transmission conditions for every kappa.
  consistent,
  /// 1/(2 kappa) beta0 (first row), 1/2 beta1 (second row).
  alternate,
};

/// Block operator and right-hand-side operators at one frequency.
/// Unknowns are stacked per obstacle as [lambda_i, phi_i]; data vectors are
/// stacked per obstacle (beta0 over Y_h, beta1 over X_h). The right-hand side
/// is rhs_beta0 * beta0 + rhs_beta1 * beta1.
struct BlockSystem {
  Complex s;
  Eigen::MatrixXcd matrix;
  Eigen::MatrixXcd rhs_beta0;
  Eigen::MatrixXcd rhs_beta1;
};

/// Singular frequency solve.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, int index, Complex s)
      : std::runtime_error(what), index_(index), s_(s) {}
  int index() const { return index_; }
  Complex frequency() const { return s_; }

 private:
  int index_;
  Complex s_;
};

/// The transmission system for one or more disjoint obstacles. Quadrature
/// layouts are built once; assemble() is thread-safe.
class TransmissionProblem {
 public:
  TransmissionProblem(std::vector<Obstacle> obstacles, AssemblyOptions options = {},
                      RhsScaling scaling = RhsScaling::consistent);

  std::span<const Obstacle> obstacles() const { return obstacles_; }
  const AssemblyOptions& options() const { return options_; }
  RhsScaling scaling() const { return scaling_; }

  /// Offsets of each obstacle in the stacked unknown (size n+1) and data
  /// (size n+1) vectors.
  const std::vector<int>& unknown_offsets() const { return unknown_offsets_; }
  const std::vector<int>& data_offsets() const { return data_offsets_; }
  int unknowns() const { return unknown_offsets_.back(); }
  int data_size() const { return data_offsets_.back(); }

  BlockSystem assemble(Complex s) const;

  /// Field at points given densities and data at frequency s. Interior points
  /// of obstacle i get S_{s/m} lambda - D_{s/m} phi, exterior points the
  /// scattered field -S_s(kappa lambda - beta1) + D_s(phi - beta0) summed
  /// over obstacles.
  Eigen::VectorXcd field(Complex s, const Eigen::VectorXcd& x, const Eigen::VectorXcd& beta0,
                         const Eigen::VectorXcd& beta1, std::span<const Point> points,
                         std::span<const Region> regions) const;

  std::vector<Region> locate(std::span<const Point> points) const;

 private:
  std::vector<Obstacle> obstacles_;
  AssemblyOptions options_;
  RhsScaling scaling_;
  std::vector<int> unknown_offsets_;
  std::vector<int> data_offsets_;
  std::vector<std::unique_ptr<Assembler>> self_;   // per obstacle
  std::vector<std::unique_ptr<Assembler>> cross_;  // i < j, row-major
};

/// Single-obstacle conveniences.
BlockSystem assemble_block(Complex s, const Mesh& mesh, const MaterialParams& mat,
                           const AssemblyOptions& options = {});
Eigen::VectorXcd assemble_rhs_hat(Complex s, const Mesh& mesh, const MaterialParams& mat,
                                  const Eigen::VectorXcd& beta0, const Eigen::VectorXcd& beta1,
                                  RhsScaling scaling = RhsScaling::consistent,
                                  const AssemblyOptions& options = {});

struct SolveOptions {
  bool cache_spectra = false;
  int threads = 0;  ///< 0 keeps the runtime default
};

/// Time series from a solve. Rows are time steps n = 0..M.
struct DensityHistory {
  Eigen::MatrixXd lambda;  ///< stacked X_h coefficients
  Eigen::MatrixXd phi;     ///< stacked Y_h coefficients
  Eigen::MatrixXd field;   ///< one column per observation point
  std::vector<Region> regions;
  double imaginary_residual = 0.0;
  bool symmetry_warning = false;

  /// Present with SolveOptions::cache_spectra: solution spectra (rows are
  /// frequencies, columns the stacked unknowns) and data spectra.
  Eigen::MatrixXcd solution_spectra;
  Eigen::MatrixXcd beta0_spectra;
  Eigen::MatrixXcd beta1_spectra;
};

/// All-steps-at-once solve for stacked data series (rows are time steps).
DensityHistory solve_history(const TransmissionProblem& problem, const Eigen::MatrixXd& beta0,
                             const Eigen::MatrixXd& beta1, const CQGrid& grid,
                             std::span<const Point> observation, const SolveOptions& options = {});

/// Field time series at points from cached spectra; rows are time steps.
Eigen::MatrixXd field_history(const TransmissionProblem& problem, const DensityHistory& history,
                              const CQGrid& grid, std::span<const Point> points,
                              std::span<const Region> regions, const SolveOptions& options = {});

}  // namespace tdbem

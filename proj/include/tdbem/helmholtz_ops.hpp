// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "tdbem/geometry.hpp"
#include "tdbem/special_functions.hpp"

namespace tdbem {

/// Non-finite entry produced during assembly.
class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OperatorKind { V, K, J, W };
enum class PotentialKind { S, D };

/// (1/2pi) K0(s r). Throws DomainError for r <= 0.
Complex fundamental_solution(Complex s, double r);

/// Quadrature controls. Regular cell pairs use `order` points per cell when
/// close and fewer points further away; singular pairs use a graded rule.
struct AssemblyOptions {
  int order = 6;
  int singular_order = 8;
  int singular_levels = 6;
  double grading = 0.15;
  /// Pairs with Re(s) * gap above this are dropped (|K0| ~ e^-cutoff).
  double decay_cutoff = 40.0;
};

/// Galerkin matrices at one frequency. V: X x X, K: X x Y, J: Y x X, W: Y x Y.
struct OperatorSet {
  Eigen::MatrixXcd V;
  Eigen::MatrixXcd K;
  Eigen::MatrixXcd J;
  Eigen::MatrixXcd W;

  const Eigen::MatrixXcd& operator[](OperatorKind kind) const;
};

/// Assembles V, K, J, W together for one mesh, or for a pair of meshes
/// (test functions on the first, trial functions on the second). The
/// quadrature layout is built once and reused for every frequency.
class Assembler {
 public:
  explicit Assembler(const Mesh& mesh, AssemblyOptions options = {});
  Assembler(const Mesh& test, const Mesh& trial, AssemblyOptions options = {});

  OperatorSet assemble(Complex s) const;

  const AssemblyOptions& options() const { return options_; }

 private:
  struct CellRule {
    Eigen::Matrix2Xd x;
    Eigen::Matrix2Xd normal;
    Eigen::VectorXd w;    // quadrature weight
    Eigen::VectorXd wj;   // weight times jacobian
    Eigen::Matrix2Xd psi;  // the two P1 shape values
  };
  struct Pair {
    int a;
    int b;
    int order;
    double gap;
    double size;
    int type;  // 0 regular, 1 coincident, 2 adjacent (a's end meets b's start)
  };

  void build_rules(const Mesh& mesh, std::vector<std::vector<CellRule>>& rules) const;
  void build_pairs();

  const Mesh* test_;
  const Mesh* trial_;
  bool same_;
  AssemblyOptions options_;
  std::vector<std::vector<CellRule>> test_rules_;
  std::vector<std::vector<CellRule>> trial_rules_;
  std::vector<Pair> pairs_;
  double diameter_ = 0.0;
};

/// One operator on one mesh.
Eigen::MatrixXcd assemble(OperatorKind kind, Complex s, const Mesh& mesh,
                          const AssemblyOptions& options = {});

/// All four operators on one mesh.
OperatorSet assemble_operators(Complex s, const Mesh& mesh, const AssemblyOptions& options = {});

/// Exact pairings of P0 and P1 functions: first = <chi_i, psi_j> (rows X_h,
/// columns Y_h), second = its transpose.
struct MixedMass {
  Eigen::MatrixXd x_on_y;
  Eigen::MatrixXd y_on_x;
};
MixedMass mixed_mass(const Mesh& mesh);

/// Gram matrix of the P1 basis.
Eigen::MatrixXd p1_mass(const Mesh& mesh);

/// Layer potential matrix: rows are points, columns are X_h (S) or Y_h (D)
/// basis functions. Points within one panel length of the boundary are
/// integrated on subdivided cells and flagged.
struct PotentialMatrix {
  Eigen::MatrixXcd values;
  std::vector<bool> near;
};
PotentialMatrix potential_matrix(PotentialKind kind, Complex s, const Mesh& mesh,
                                 std::span<const Point> points, const AssemblyOptions& options = {});

/// Layer potential applied to a density.
Eigen::VectorXcd potential(PotentialKind kind, Complex s, const Eigen::VectorXcd& density,
                           const Mesh& mesh, std::span<const Point> points,
                           const AssemblyOptions& options = {});

/// Both potentials at once (shares the kernel evaluations).
struct PotentialPair {
  Eigen::MatrixXcd S;
  Eigen::MatrixXcd D;
  std::vector<bool> near;
};
PotentialPair potential_matrices(Complex s, const Mesh& mesh, std::span<const Point> points,
                                 const AssemblyOptions& options = {});

}  // namespace tdbem

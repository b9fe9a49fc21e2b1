// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "../common/circle_oracle.hpp"
#include "tdbem/helmholtz_ops.hpp"

using namespace tdbem;

namespace {

double max_abs(const Eigen::MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

Boundary quadrilateral() { return Boundary::polygon({{0.0, 0.0}, {1.0, 0.0}, {0.8, 0.8}, {0.2, 1.0}}); }

}  // namespace

TEST_CASE("fundamental solution") {
  CHECK(std::abs(fundamental_solution(1.0, 1.0) - 0.42102443824070834 / (2 * std::numbers::pi)) < 1e-16);
  CHECK(std::abs(fundamental_solution(2.0, 0.5) - fundamental_solution(1.0, 1.0)) < 1e-16);
  CHECK(std::abs(fundamental_solution(3.7, 0.2).imag()) <= 1e-14 * std::abs(fundamental_solution(3.7, 0.2)));
  CHECK_THROWS_AS(fundamental_solution(1.0, 0.0), DomainError);
}

TEST_CASE("structural identities") {
  for (const Mesh& mesh : {Mesh(Boundary::smooth_square(), 50), Mesh(quadrilateral(), 24)}) {
    for (Complex s : {Complex(2.0, 3.0), Complex(0.4, 0.0), Complex(15.0, -40.0)}) {
      const OperatorSet ops = assemble_operators(s, mesh);
      const double scale = max_abs(ops.V) + max_abs(ops.K) + max_abs(ops.W);
      CHECK(max_abs(ops.J - ops.K.transpose()) <= 1e-13 * scale);
      CHECK(max_abs(ops.V - ops.V.transpose()) <= 1e-13 * scale);
      CHECK(max_abs(ops.W - ops.W.transpose()) <= 1e-13 * scale);
      CHECK(ops.V.allFinite());
      CHECK(ops.W.allFinite());
    }
  }
}

TEST_CASE("single operators match the joint assembly") {
  const Mesh mesh(Boundary::smooth_square(), 30);
  const Complex s(1.0, 2.0);
  const OperatorSet ops = assemble_operators(s, mesh);
  CHECK(max_abs(assemble(OperatorKind::V, s, mesh) - ops.V) == 0.0);
  CHECK(max_abs(assemble(OperatorKind::W, s, mesh) - ops.W) == 0.0);
  CHECK(max_abs(assemble(OperatorKind::J, s, mesh) - ops[OperatorKind::J]) == 0.0);
}

TEST_CASE("conjugate frequency gives conjugate matrices") {
  const Mesh mesh(quadrilateral(), 16);
  const OperatorSet a = assemble_operators(Complex(1.5, 2.5), mesh);
  const OperatorSet b = assemble_operators(Complex(1.5, -2.5), mesh);
  CHECK(max_abs(a.V.conjugate() - b.V) < 1e-15 * max_abs(a.V) * 10);
  CHECK(max_abs(a.W.conjugate() - b.W) < 1e-15 * max_abs(a.W) * 10);
}

TEST_CASE("positivity at real frequency") {
  const Mesh mesh(Boundary::smooth_square(), 40);
  const OperatorSet ops = assemble_operators(0.7, mesh);
  std::mt19937 gen(5);
  std::normal_distribution<double> g;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.size());
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd x(mesh.size());
    for (auto& v : x) v = g(gen);
    CHECK(x.dot(ops.V.real() * x) > 0.0);
    // W is positive on every vector at s > 0 (the s^2 term), in particular off constants
    const Eigen::VectorXd y = x - ones * (x.sum() / x.size());
    CHECK(y.dot(ops.W.real() * y) > 0.0);
  }
  CHECK(ops.V.imag().cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("circle spectral oracle") {
  // Constant mode is reproduced exactly by the discrete spaces: only quadrature error.
  for (Complex s : {Complex(1.0, 0.0), Complex(2.0, 3.0)}) {
    const auto e0 = oracle::circle_mode_errors(0, s, 64);
    CHECK(e0.V < 1e-6);
    CHECK(e0.W < 1e-6);
  }
  // n = 0, N = 64: relative error well inside 2e-3
  CHECK(oracle::circle_mode_errors(0, 1.0, 64).V < 2e-3);
  // Higher modes converge at second order or better.
  for (int n = 1; n <= 2; ++n) {
    const auto a = oracle::circle_mode_errors(n, Complex(2.0, 3.0), 32);
    const auto b = oracle::circle_mode_errors(n, Complex(2.0, 3.0), 64);
    CHECK(std::log2(a.V / b.V) > 1.8);
    CHECK(std::log2(a.W / b.W) > 1.8);
    CHECK(std::log2(a.K / b.K) > 1.8);
  }
  // The W eigenvalue has positive real part at real frequency.
  CHECK(oracle::circle_w(1, 1.0, 1.0).real() > 0.0);
}

TEST_CASE("quadrature order is not the limiting error") {
  AssemblyOptions fine;
  fine.order = 12;
  fine.singular_order = 12;
  const auto coarse_q = oracle::circle_mode_errors(2, 1.0, 32);
  const auto fine_q = oracle::circle_mode_errors(2, 1.0, 32, 1.0, fine);
  CHECK(std::abs(coarse_q.V - fine_q.V) < 0.05 * coarse_q.V);
  CHECK(std::abs(coarse_q.W - fine_q.W) < 0.05 * coarse_q.W);
}

TEST_CASE("mixed mass matrices") {
  const Mesh circle(Boundary::circle(Point::Zero(), 1.0), 4);
  const MixedMass mc = mixed_mass(circle);
  const Eigen::VectorXd moments = mc.x_on_y * Eigen::VectorXd::Ones(4);
  for (int j = 0; j < 4; ++j) CHECK(moments(j) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));

  const Mesh smooth(Boundary::smooth_square(), 100);
  const MixedMass ms = mixed_mass(smooth);
  const Eigen::VectorXd rows = ms.x_on_y.rowwise().sum();
  CHECK(((rows - smooth.lengths()).cwiseAbs().array() / smooth.lengths().array()).maxCoeff() < 1e-12);
  CHECK((ms.y_on_x - ms.x_on_y.transpose()).cwiseAbs().maxCoeff() == 0.0);

  const Mesh square(Boundary::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), 8);
  const MixedMass mq = mixed_mass(square);
  // node 1 sits between panels 0 and 1
  CHECK(mq.y_on_x(1, 0) == doctest::Approx(0.25));
  CHECK(mq.y_on_x(1, 1) == doctest::Approx(0.25));
  CHECK(mq.y_on_x.row(1).sum() == doctest::Approx(0.5));
  CHECK(mq.y_on_x.sum() == doctest::Approx(4.0));
}

TEST_CASE("layer potentials") {
  const Mesh mesh(Boundary::circle(Point::Zero(), 1.0), 64);
  const std::vector<Point> center{Point::Zero()};
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(64);
  const Eigen::VectorXcd sv = potential(PotentialKind::S, 1.0, ones, mesh, center);
  CHECK(std::abs(sv(0) - 0.42102443824070834) < 1e-12);

  CHECK(potential(PotentialKind::D, 1.0, Eigen::VectorXcd::Zero(64), mesh, center).cwiseAbs().maxCoeff() == 0.0);

  // PDE residual of S eta and D phi at exterior points
  std::mt19937 gen(2);
  std::normal_distribution<double> g;
  Eigen::VectorXcd eta(64);
  for (auto& v : eta) v = Complex(g(gen), g(gen));
  const Complex s(1.3, 0.6);
  const double h = 1e-3;
  for (const Point& x : {Point(2.0, 0.5), Point(-1.5, -1.2)}) {
    const std::vector<Point> pts{x, x + Point(h, 0), x - Point(h, 0), x + Point(0, h), x - Point(0, h)};
    for (PotentialKind kind : {PotentialKind::S, PotentialKind::D}) {
      const Eigen::VectorXcd u = potential(kind, s, eta, mesh, pts);
      const Complex lap = (u(1) + u(2) + u(3) + u(4) - 4.0 * u(0)) / (h * h);
      CHECK(std::abs(lap - s * s * u(0)) <= 1e-4 * std::abs(s * s * u(0)));
    }
  }

  // Near points are flagged and integrated on subdivided cells.
  const std::vector<Point> near{Point(1.02, 0.0), Point(3.0, 0.0)};
  const PotentialMatrix pm = potential_matrix(PotentialKind::S, 1.0, mesh, near);
  CHECK(pm.near[0]);
  CHECK_FALSE(pm.near[1]);
  const PotentialPair pp = potential_matrices(1.0, mesh, near);
  CHECK((pp.S - pm.values).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("Green's identity at an interior point") {
  // For u = K0(s|x - z|)/(2 pi) with z outside, S(du/dn) - D(u) = u inside.
  const Complex s(1.0, 0.5);
  const Point z(3.0, 1.0);
  const Mesh mesh(Boundary::smooth_square(), 160);
  Eigen::VectorXcd flux(mesh.size()), trace(mesh.size());
  for (int j = 0; j < mesh.size(); ++j) {
    const Point d = mesh.midpoints().col(j) - z;
    const double r = d.norm();
    flux(j) = -s * bessel_k1(s * r) / (2 * std::numbers::pi) * d.dot(mesh.normals().col(j)) / r;
    trace(j) = fundamental_solution(s, (mesh.nodes().col(j) - z).norm());
  }
  const std::vector<Point> x{Point(0.1, -0.2)};
  const Complex u = potential(PotentialKind::S, s, flux, mesh, x)(0) - potential(PotentialKind::D, s, trace, mesh, x)(0);
  const Complex exact = fundamental_solution(s, (x[0] - z).norm());
  CHECK(std::abs(u - exact) < 1e-3 * std::abs(exact));
}

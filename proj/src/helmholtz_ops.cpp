// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdbem/helmholtz_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "tdbem/quadrature.hpp"

namespace tdbem {

namespace {

constexpr double kInv2Pi = 0.5 / std::numbers::pi;

struct Kernel {
  Complex phi;
  Complex gy;  // d/dnu(y)
  Complex gx;  // d/dnu(x)
};

inline Kernel kernel(const BesselK01Table& table, const Eigen::Vector2d& x, const Eigen::Vector2d& nx,
                     const Eigen::Vector2d& y, const Eigen::Vector2d& ny) {
  const Eigen::Vector2d d = x - y;
  const double r = d.norm();
  // Only reachable through roundoff at the centre of a singular rule, where
  // the weight is negligible.
  if (r == 0.0) return {0.0, 0.0, 0.0};
  const BesselK01 k = table(r);
  const Complex f = table.frequency() * k.k1 * (kInv2Pi / r);
  return {k.k0 * kInv2Pi, f * d.dot(ny), -f * d.dot(nx)};
}

// Contributions of one cell pair, before scattering into the matrices.
struct Block {
  Complex v = 0.0;
  Complex k[2] = {0.0, 0.0};    // K against the trial cell's P1 functions
  Complex j[2] = {0.0, 0.0};    // J for the test cell's P1 functions
  Complex wd = 0.0;             // sum of w_u w_v Phi
  Complex wm[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

  void add_vw(const Kernel& g, double wuv, double wjj, double nn, const double* pa,
              const double* pb) {
    v += wjj * g.phi;
    wd += wuv * g.phi;
    const Complex m = wjj * nn * g.phi;
    for (int p = 0; p < 2; ++p) {
      for (int q = 0; q < 2; ++q) wm[p][q] += m * (pa[p] * pb[q]);
    }
  }
  void add_kj(const Kernel& g, double wjj, const double* pa, const double* pb) {
    const Complex gy = wjj * g.gy;
    const Complex gx = wjj * g.gx;
    k[0] += gy * pb[0];
    k[1] += gy * pb[1];
    j[0] += gx * pa[0];
    j[1] += gx * pa[1];
  }
};

double shape(const Cell& c, int p, double u) {
  return (1.0 - u) * c.value_start[p] + u * c.value_end[p];
}

double shape_slope(const Cell& c, int p) { return c.value_end[p] - c.value_start[p]; }

int oscillation_floor(double sl) {
  if (sl <= 0.3) return 2;
  if (sl <= 1.0) return 3;
  if (sl <= 2.0) return 4;
  if (sl <= 4.0) return 6;
  return static_cast<int>(std::ceil(sl)) + 3;
}

int distance_order(double ratio, int order) {
  if (ratio < 4.0) return order;
  if (ratio < 10.0) return std::min(order, 4);
  if (ratio < 30.0) return std::min(order, 3);
  return std::min(order, 2);
}

// Integrate a singular cell pair through a map (u, v, weight) supplied by `points`.
template <typename Points>
void singular_block(const BesselK01Table& table, const Mesh& mesh, const Cell& ca, const Cell& cb, bool vw, bool kj,
                    Points&& points, Block& blk) {
  points([&](double u, double v, double w) {
    const CellPoint pa = mesh.at(ca, u);
    const CellPoint pb = mesh.at(cb, v);
    const Kernel g = kernel(table, pa.x, pa.normal, pb.x, pb.normal);
    const double sa[2] = {shape(ca, 0, u), shape(ca, 1, u)};
    const double sb[2] = {shape(cb, 0, v), shape(cb, 1, v)};
    const double wjj = w * pa.jacobian * pb.jacobian;
    if (vw) blk.add_vw(g, w, wjj, pa.normal.dot(pb.normal), sa, sb);
    if (kj) blk.add_kj(g, wjj, sa, sb);
  });
}

// Duffy map for coincident cells: w = u - v graded towards 0.
auto coincident_points(const QuadratureRule& rw, const QuadratureRule& rt) {
  return [&rw, &rt](auto&& f) {
    for (Eigen::Index i = 0; i < rw.size(); ++i) {
      const double w = rw.nodes(i);
      for (Eigen::Index k = 0; k < rt.size(); ++k) {
        const double v = (1.0 - w) * rt.nodes(k);
        const double weight = rw.weights(i) * rt.weights(k) * (1.0 - w);
        f(v + w, v, weight);
        f(v, v + w, weight);
      }
    }
  };
}

// Duffy map for cells meeting at a's end and b's start.
auto adjacent_points(const QuadratureRule& rr, const QuadratureRule& re) {
  return [&rr, &re](auto&& f) {
    for (Eigen::Index i = 0; i < rr.size(); ++i) {
      const double rho = rr.nodes(i);
      for (Eigen::Index k = 0; k < re.size(); ++k) {
        const double eta = re.nodes(k);
        const double weight = rr.weights(i) * re.weights(k) * rho;
        f(1.0 - rho, rho * eta, weight);
        f(1.0 - rho * eta, rho, weight);
      }
    }
  };
}

Eigen::AlignedBox2d bounding_box(const Mesh& mesh) {
  Eigen::AlignedBox2d box;
  const QuadratureRule& g = gauss_legendre(16);
  for (const Cell& c : mesh.cells()) {
    box.extend(c.start);
    box.extend(c.end);
    for (Eigen::Index i = 0; i < g.size(); ++i) box.extend(mesh.at(c, g.nodes(i)).x);
  }
  return box;
}

}  // namespace

Complex fundamental_solution(Complex s, double r) {
  if (!(r > 0.0)) throw DomainError("fundamental solution evaluated at r <= 0");
  return bessel_k0(s * r) * kInv2Pi;
}

const Eigen::MatrixXcd& OperatorSet::operator[](OperatorKind kind) const {
  switch (kind) {
    case OperatorKind::V:
      return V;
    case OperatorKind::K:
      return K;
    case OperatorKind::J:
      return J;
    case OperatorKind::W:
      return W;
  }
  return V;
}

Assembler::Assembler(const Mesh& mesh, AssemblyOptions options)
    : test_(&mesh), trial_(&mesh), same_(true), options_(options) {
  build_rules(mesh, test_rules_);
  build_pairs();
}

Assembler::Assembler(const Mesh& test, const Mesh& trial, AssemblyOptions options)
    : test_(&test), trial_(&trial), same_(&test == &trial), options_(options) {
  build_rules(test, test_rules_);
  if (!same_) build_rules(trial, trial_rules_);
  build_pairs();
}

void Assembler::build_rules(const Mesh& mesh, std::vector<std::vector<CellRule>>& rules) const {
  if (options_.order < 2) throw ConfigError("quadrature order must be at least 2");
  const auto cells = mesh.cells();
  rules.assign(cells.size(), {});
  for (std::size_t c = 0; c < cells.size(); ++c) {
    rules[c].resize(options_.order + 1);
    for (int q = 2; q <= options_.order; ++q) {
      const QuadratureRule& g = gauss_legendre(q);
      CellRule& r = rules[c][q];
      r.x.resize(2, q);
      r.normal.resize(2, q);
      r.w = g.weights;
      r.wj.resize(q);
      r.psi.resize(2, q);
      for (int i = 0; i < q; ++i) {
        const CellPoint p = mesh.at(cells[c], g.nodes(i));
        r.x.col(i) = p.x;
        r.normal.col(i) = p.normal;
        r.wj(i) = g.weights(i) * p.jacobian;
        r.psi(0, i) = shape(cells[c], 0, g.nodes(i));
        r.psi(1, i) = shape(cells[c], 1, g.nodes(i));
      }
    }
  }
}

void Assembler::build_pairs() {
  Eigen::AlignedBox2d box = bounding_box(*test_);
  box.extend(bounding_box(*trial_));
  diameter_ = 1.01 * box.diagonal().norm();
  const auto ca = test_->cells();
  const auto cb = trial_->cells();
  const int na = static_cast<int>(ca.size());
  const int nb = static_cast<int>(cb.size());
  pairs_.clear();
  for (int a = 0; a < na; ++a) {
    for (int b = same_ ? a : 0; b < nb; ++b) {
      Pair p{a, b, options_.order, 0.0, std::max(ca[a].length, cb[b].length), 0};
      const double d = (ca[a].center - cb[b].center).norm();
      p.gap = std::max(0.0, d - 0.5 * (ca[a].length + cb[b].length));
      if (same_ && a == b) {
        p.type = 1;
      } else if (same_ && test_->adjacent(a, b)) {
        p.type = 2;
        if ((a + 1) % na != b) std::swap(p.a, p.b);
      } else {
        p.order = distance_order(d / p.size, options_.order);
      }
      pairs_.push_back(p);
    }
  }
}

OperatorSet Assembler::assemble(Complex s) const {
  const auto cells_a = test_->cells();
  const auto cells_b = trial_->cells();
  const int nxa = test_->spaces().dim_x;
  const int nya = test_->spaces().dim_y;
  const int nxb = trial_->spaces().dim_x;
  const int nyb = trial_->spaces().dim_y;
  const std::vector<std::vector<CellRule>>& rules_b = same_ ? test_rules_ : trial_rules_;

  OperatorSet out;
  out.V = Eigen::MatrixXcd::Zero(nxa, nxb);
  out.K = Eigen::MatrixXcd::Zero(nxa, nyb);
  out.J = Eigen::MatrixXcd::Zero(nya, nxb);
  out.W = Eigen::MatrixXcd::Zero(nya, nyb);

  const double abs_s = std::abs(s);
  const Complex s2 = s * s;
  const BesselK01Table table(s, diameter_);
  const QuadratureRule graded =
      graded_rule(options_.singular_order, options_.singular_levels, options_.grading);
  const QuadratureRule& plain = gauss_legendre(options_.singular_order);

  for (const Pair& p : pairs_) {
    if (p.type == 0 && s.real() * p.gap > options_.decay_cutoff) continue;
    const Cell& ca = cells_a[p.a];
    const Cell& cb = cells_b[p.b];
    // Straight collinear pieces carry no double-layer kernel.
    const bool kj = !(same_ && ca.edge >= 0 && ca.edge == cb.edge);
    Block blk;
    if (p.type == 0) {
      const int q = std::min(options_.order, std::max(p.order, oscillation_floor(abs_s * p.size)));
      const CellRule& ra = test_rules_[p.a][q];
      const CellRule& rb = rules_b[p.b][q];
      for (int i = 0; i < q; ++i) {
        const double pa[2] = {ra.psi(0, i), ra.psi(1, i)};
        for (int k = 0; k < q; ++k) {
          const Kernel g = kernel(table, ra.x.col(i), ra.normal.col(i), rb.x.col(k), rb.normal.col(k));
          const double pb[2] = {rb.psi(0, k), rb.psi(1, k)};
          const double wjj = ra.wj(i) * rb.wj(k);
          blk.add_vw(g, ra.w(i) * rb.w(k), wjj, ra.normal.col(i).dot(rb.normal.col(k)), pa, pb);
          if (kj) blk.add_kj(g, wjj, pa, pb);
        }
      }
    } else if (p.type == 1) {
      singular_block(table, *test_, ca, cb, true, false, coincident_points(graded, plain), blk);
      if (kj) singular_block(table, *test_, ca, cb, false, true, coincident_points(plain, plain), blk);
    } else {
      singular_block(table, *test_, ca, cb, true, false, adjacent_points(graded, plain), blk);
      if (kj) singular_block(table, *test_, ca, cb, false, true, adjacent_points(plain, plain), blk);
    }

    Complex wloc[2][2];
    for (int k = 0; k < 2; ++k) {
      for (int l = 0; l < 2; ++l) {
        wloc[k][l] = shape_slope(ca, k) * shape_slope(cb, l) * blk.wd + s2 * blk.wm[k][l];
      }
    }
    const bool mirror = same_ && p.a != p.b;
    out.V(ca.panel, cb.panel) += blk.v;
    if (mirror) out.V(cb.panel, ca.panel) += blk.v;
    for (int k = 0; k < 2; ++k) {
      out.K(ca.panel, cb.nodes[k]) += blk.k[k];
      if (mirror) {
        out.K(cb.panel, ca.nodes[k]) += blk.j[k];
      } else if (!same_) {
        out.J(ca.nodes[k], cb.panel) += blk.j[k];
      }
      for (int l = 0; l < 2; ++l) {
        out.W(ca.nodes[k], cb.nodes[l]) += wloc[k][l];
        if (mirror) out.W(cb.nodes[l], ca.nodes[k]) += wloc[k][l];
      }
    }
  }

  if (same_) {
    out.V = (0.5 * (out.V + out.V.transpose())).eval();
    out.W = (0.5 * (out.W + out.W.transpose())).eval();
    out.J = out.K.transpose();
  }
  if (!out.V.allFinite() || !out.K.allFinite() || !out.J.allFinite() || !out.W.allFinite()) {
    throw AssemblyError("non-finite operator entry");
  }
  return out;
}

Eigen::MatrixXcd assemble(OperatorKind kind, Complex s, const Mesh& mesh,
                          const AssemblyOptions& options) {
  return Assembler(mesh, options).assemble(s)[kind];
}

OperatorSet assemble_operators(Complex s, const Mesh& mesh, const AssemblyOptions& options) {
  return Assembler(mesh, options).assemble(s);
}

MixedMass mixed_mass(const Mesh& mesh) {
  MixedMass m;
  m.x_on_y = Eigen::MatrixXd::Zero(mesh.spaces().dim_x, mesh.spaces().dim_y);
  const QuadratureRule& g = gauss_legendre(8);
  for (const Cell& c : mesh.cells()) {
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const double u = g.nodes(i);
      const double wj = g.weights(i) * mesh.at(c, u).jacobian;
      for (int k = 0; k < 2; ++k) m.x_on_y(c.panel, c.nodes[k]) += wj * shape(c, k, u);
    }
  }
  m.y_on_x = m.x_on_y.transpose();
  return m;
}

Eigen::MatrixXd p1_mass(const Mesh& mesh) {
  const int n = mesh.spaces().dim_y;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const QuadratureRule& g = gauss_legendre(8);
  for (const Cell& c : mesh.cells()) {
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const double u = g.nodes(i);
      const double wj = g.weights(i) * mesh.at(c, u).jacobian;
      for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) m(c.nodes[k], c.nodes[l]) += wj * shape(c, k, u) * shape(c, l, u);
      }
    }
  }
  return m;
}

PotentialPair potential_matrices(Complex s, const Mesh& mesh, std::span<const Point> points,
                                 const AssemblyOptions& options) {
  const auto cells = mesh.cells();
  const Eigen::Index np = static_cast<Eigen::Index>(points.size());
  PotentialPair out;
  out.S = Eigen::MatrixXcd::Zero(np, mesh.spaces().dim_x);
  out.D = Eigen::MatrixXcd::Zero(np, mesh.spaces().dim_y);
  out.near.assign(points.size(), false);
  const double panel = mesh.max_panel_length();
  const double abs_s = std::abs(s);
  constexpr int kSubdivisions = 4;
  const int near_order = std::max(options.order, 8);
  Eigen::AlignedBox2d box = bounding_box(mesh);
  for (const Point& x : points) box.extend(x);
  const BesselK01Table table(s, 1.01 * box.diagonal().norm());

  for (Eigen::Index ip = 0; ip < np; ++ip) {
    const Point& x = points[ip];
    for (const Cell& c : cells) {
      const double d = (x - c.center).norm();
      const double gap = d - 0.5 * c.length;
      if (gap < panel) out.near[ip] = true;
      if (s.real() * gap > options.decay_cutoff) continue;
      const double ratio = d / c.length;
      const bool subdivide = ratio < 1.5;
      const int pieces = subdivide ? kSubdivisions : 1;
      const int q = subdivide ? near_order
                              : std::min(options.order, std::max(distance_order(ratio, options.order),
                                                                 oscillation_floor(abs_s * c.length)));
      const QuadratureRule& g = gauss_legendre(q);
      Complex sv = 0.0;
      Complex dv[2] = {0.0, 0.0};
      for (int piece = 0; piece < pieces; ++piece) {
        for (int i = 0; i < q; ++i) {
          const double u = (piece + g.nodes(i)) / pieces;
          const CellPoint y = mesh.at(c, u);
          const double wj = g.weights(i) * y.jacobian / pieces;
          const Kernel k = kernel(table, x, y.normal, y.x, y.normal);
          sv += wj * k.phi;
          dv[0] += wj * shape(c, 0, u) * k.gy;
          dv[1] += wj * shape(c, 1, u) * k.gy;
        }
      }
      out.S(ip, c.panel) += sv;
      out.D(ip, c.nodes[0]) += dv[0];
      out.D(ip, c.nodes[1]) += dv[1];
    }
  }
  return out;
}

PotentialMatrix potential_matrix(PotentialKind kind, Complex s, const Mesh& mesh,
                                 std::span<const Point> points, const AssemblyOptions& options) {
  PotentialPair both = potential_matrices(s, mesh, points, options);
  PotentialMatrix out;
  out.values = kind == PotentialKind::S ? std::move(both.S) : std::move(both.D);
  out.near = std::move(both.near);
  return out;
}

Eigen::VectorXcd potential(PotentialKind kind, Complex s, const Eigen::VectorXcd& density,
                           const Mesh& mesh, std::span<const Point> points,
                           const AssemblyOptions& options) {
  const PotentialMatrix m = potential_matrix(kind, s, mesh, points, options);
  if (density.size() != m.values.cols()) {
    throw std::invalid_argument("density length does not match the trace space");
  }
  return m.values * density;
}

}  // namespace tdbem

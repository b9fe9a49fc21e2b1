// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace tdbem {

using Point = Eigen::Vector2d;

/// Invalid geometry or discretisation parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BoundaryKind { smooth, polygon, circle };

struct CurvePoint {
  Point point;
  Eigen::Vector2d tangent;  ///< derivative with respect to the parameter
};

/// The rotated "smoothened square" x(z) = ((1+cos^2 z) cos z, (1+sin^2 z) sin z) R
/// with R the +45 degree rotation (row-vector convention). 2*pi periodic and
/// counterclockwise.
CurvePoint smooth_curve_point(double z);

/// A closed, counterclockwise boundary curve.
///
/// Smooth curves and circles are parametrised over [0, 2*pi). Polygons are
/// parametrised over [0, n_vertices) with edge e covering [e, e+1].
class Boundary {
 public:
  static Boundary smooth_square();
  static Boundary polygon(std::vector<Point> vertices);
  static Boundary circle(Point center, double radius);

  BoundaryKind kind() const { return kind_; }
  bool is_parametric() const { return kind_ != BoundaryKind::polygon; }
  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  double parameter_length() const;

  /// Point and parameter derivative. For polygons `edge` selects the edge
  /// (so that vertices are attributed unambiguously); it is ignored otherwise.
  CurvePoint evaluate(double t, int edge = -1) const;

  /// Total arc length (closed form for polygons and circles, 64-point Gauss
  /// per 1/256 of the period for the smooth curve).
  double perimeter() const;

 private:
  BoundaryKind kind_ = BoundaryKind::smooth;
  std::vector<Point> vertices_;
  Point center_ = Point::Zero();
  double radius_ = 0.0;
};

/// Piece of the boundary on which every trace-space basis function is a
/// polynomial in the local coordinate u in [0, 1].
struct Cell {
  int panel = 0;  ///< P0 (X_h) basis function supported here
  int edge = -1;  ///< polygon edge, -1 for parametric curves
  double t0 = 0.0;
  double t1 = 0.0;
  Point start;
  Point end;
  Point center;
  double length = 0.0;
  /// P1 (Y_h) basis functions that do not vanish on the cell, with their
  /// values at u = 0 and u = 1 (linear in between).
  std::array<int, 2> nodes{};
  std::array<double, 2> value_start{};
  std::array<double, 2> value_end{};
};

/// Quadrature-ready evaluation of a cell at a local coordinate.
struct CellPoint {
  Point x;
  Eigen::Vector2d normal;  ///< unit outward normal
  double jacobian = 0.0;   ///< |dx/du|
};

/// P0 / continuous P1 trace space pair on a mesh. dim_x = dim_y = panel count.
struct TraceSpaces {
  int dim_x = 0;
  int dim_y = 0;
  bool staggered = false;
  /// For each P1 node, the panels (X_h supports) its hat function touches.
  std::vector<std::vector<int>> node_panels;
};

/// Uniform mesh of one boundary with its trace spaces.
///
/// Parametric curves: panels are a uniform partition of [0, 2*pi); the P1
/// nodes sit at panel-midpoint parameters (staggered grid), so every panel
/// splits into two cells. Polygons: each edge holds N / n_vertices panels,
/// P1 nodes sit at panel endpoints (corners included) and cells = panels.
class Mesh {
 public:
  Mesh(Boundary boundary, int panel_count);

  const Boundary& boundary() const { return boundary_; }
  int size() const { return static_cast<int>(lengths_.size()); }
  bool staggered() const { return spaces_.staggered; }
  const TraceSpaces& spaces() const { return spaces_; }
  std::span<const Cell> cells() const { return cells_; }

  const Eigen::Matrix2Xd& panel_starts() const { return starts_; }
  const Eigen::Matrix2Xd& midpoints() const { return midpoints_; }
  const Eigen::Matrix2Xd& normals() const { return normals_; }
  const Eigen::VectorXd& lengths() const { return lengths_; }
  const Eigen::VectorXd& panel_parameters() const { return panel_params_; }
  const Eigen::VectorXd& midpoint_parameters() const { return midpoint_params_; }
  /// Parameters and physical positions of the P1 nodes.
  const Eigen::VectorXd& node_parameters() const { return node_params_; }
  const Eigen::Matrix2Xd& nodes() const { return nodes_; }

  CellPoint at(const Cell& cell, double u) const;

  /// Cells adjacent along the curve (sharing an endpoint).
  bool adjacent(int a, int b) const;

  double max_panel_length() const { return lengths_.maxCoeff(); }

 private:
  Boundary boundary_;
  TraceSpaces spaces_;
  std::vector<Cell> cells_;
  Eigen::Matrix2Xd starts_;
  Eigen::Matrix2Xd midpoints_;
  Eigen::Matrix2Xd normals_;
  Eigen::VectorXd lengths_;
  Eigen::VectorXd panel_params_;
  Eigen::VectorXd midpoint_params_;
  Eigen::VectorXd node_params_;
  Eigen::Matrix2Xd nodes_;
};

/// Convenience wrapper matching the mesh constructor.
Mesh build_mesh(const Boundary& boundary, int panel_count);

/// Region label: index of the obstacle containing the point, or exterior.
struct Region {
  static constexpr int kExterior = -1;
  int obstacle = kExterior;
  bool exterior() const { return obstacle == kExterior; }
  friend bool operator==(const Region&, const Region&) = default;
};

/// Classify a point against disjoint boundaries. Throws ConfigError if the
/// point lies within 1e-9 of a boundary.
Region locate_point(const Point& p, std::span<const Boundary> boundaries);

/// Distance from `p` to the boundary curve.
double distance_to_boundary(const Point& p, const Boundary& boundary);

}  // namespace tdbem

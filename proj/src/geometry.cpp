// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdbem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "tdbem/quadrature.hpp"

namespace tdbem {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Vector2d outward_normal(const Eigen::Vector2d& tangent) {
  return Eigen::Vector2d(tangent.y(), -tangent.x()).normalized();
}

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Eigen::Vector2d ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

// Even-odd rule; exact for polygons.
bool polygon_contains(const std::vector<Point>& v, const Point& p) {
  bool inside = false;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((v[i].y() > p.y()) != (v[j].y() > p.y())) {
      const double x = v[j].x() + (p.y() - v[j].y()) * (v[i].x() - v[j].x()) / (v[i].y() - v[j].y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

// Closest parameter on a 2*pi periodic curve: dense sampling then golden section.
double closest_parameter(const Boundary& b, const Point& p) {
  constexpr int samples = 1024;
  const double h = kTwoPi / samples;
  double best_t = 0.0;
  double best = std::numeric_limits<double>::max();
  for (int i = 0; i < samples; ++i) {
    const double t = i * h;
    const double d = (b.evaluate(t).point - p).squaredNorm();
    if (d < best) {
      best = d;
      best_t = t;
    }
  }
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = best_t - h;
  double hi = best_t + h;
  auto f = [&](double t) { return (b.evaluate(t).point - p).squaredNorm(); };
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int iter = 0; iter < 80; ++iter) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

CurvePoint smooth_curve_point(double z) {
  const double c = std::cos(z);
  const double s = std::sin(z);
  const double a = (1.0 + c * c) * c;
  const double b = (1.0 + s * s) * s;
  const double da = -s * (1.0 + 3.0 * c * c);
  const double db = c * (1.0 + 3.0 * s * s);
  const double r = std::numbers::sqrt2 / 2.0;
  return {Point(r * (a - b), r * (a + b)), Eigen::Vector2d(r * (da - db), r * (da + db))};
}

Boundary Boundary::smooth_square() {
  Boundary b;
  b.kind_ = BoundaryKind::smooth;
  return b;
}

Boundary Boundary::polygon(std::vector<Point> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) throw ConfigError("polygon needs at least 3 vertices");
  double area = 0.0;
  for (std::size_t i = 0; i < n; ++i) area += cross(vertices[i], vertices[(i + 1) % n]);
  if (!(area > 0.0)) throw ConfigError("polygon vertices must be ordered counterclockwise");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n])) {
        throw ConfigError("polygon is self-intersecting");
      }
    }
  }
  Boundary b;
  b.kind_ = BoundaryKind::polygon;
  b.vertices_ = std::move(vertices);
  return b;
}

Boundary Boundary::circle(Point center, double radius) {
  if (!(radius > 0.0)) throw ConfigError("circle radius must be positive");
  Boundary b;
  b.kind_ = BoundaryKind::circle;
  b.center_ = center;
  b.radius_ = radius;
  return b;
}

double Boundary::parameter_length() const {
  return kind_ == BoundaryKind::polygon ? static_cast<double>(vertices_.size()) : kTwoPi;
}

CurvePoint Boundary::evaluate(double t, int edge) const {
  switch (kind_) {
    case BoundaryKind::smooth:
      return smooth_curve_point(t);
    case BoundaryKind::circle:
      return {center_ + radius_ * Point(std::cos(t), std::sin(t)),
              radius_ * Eigen::Vector2d(-std::sin(t), std::cos(t))};
    case BoundaryKind::polygon: {
      const int n = static_cast<int>(vertices_.size());
      if (edge < 0) {
        edge = static_cast<int>(std::floor(t));
        edge = ((edge % n) + n) % n;
        t = t - std::floor(t) + edge;
      }
      const Point& a = vertices_[edge];
      const Point& b = vertices_[(edge + 1) % n];
      return {a + (t - edge) * (b - a), b - a};
    }
  }
  return {};
}

double Boundary::perimeter() const {
  switch (kind_) {
    case BoundaryKind::circle:
      return kTwoPi * radius_;
    case BoundaryKind::polygon: {
      double sum = 0.0;
      for (std::size_t i = 0; i < vertices_.size(); ++i) {
        sum += (vertices_[(i + 1) % vertices_.size()] - vertices_[i]).norm();
      }
      return sum;
    }
    case BoundaryKind::smooth: {
      const QuadratureRule& g = gauss_legendre(64);
      constexpr int pieces = 256;
      const double h = kTwoPi / pieces;
      double sum = 0.0;
      for (int p = 0; p < pieces; ++p) {
        sum += h * g.integrate([&](double u) { return evaluate((p + u) * h).tangent.norm(); });
      }
      return sum;
    }
  }
  return 0.0;
}

Mesh::Mesh(Boundary boundary, int panel_count) : boundary_(std::move(boundary)) {
  const int n = panel_count;
  if (boundary_.is_parametric()) {
    if (n < 4) throw ConfigError("parametric boundaries need at least 4 panels");
  } else {
    const int nv = static_cast<int>(boundary_.vertices().size());
    if (n < nv || n % nv != 0) {
      throw ConfigError("polygon panel count must be a positive multiple of the vertex count");
    }
  }

  spaces_.dim_x = n;
  spaces_.dim_y = n;
  spaces_.staggered = boundary_.is_parametric();
  spaces_.node_panels.assign(n, {});

  starts_.resize(2, n);
  midpoints_.resize(2, n);
  normals_.resize(2, n);
  lengths_.setZero(n);
  panel_params_.resize(n);
  midpoint_params_.resize(n);
  node_params_.resize(n);
  nodes_.resize(2, n);

  auto finish_cell = [this](Cell& cell) {
    cell.start = at(cell, 0.0).x;
    cell.end = at(cell, 1.0).x;
    cell.center = at(cell, 0.5).x;
    if (cell.edge >= 0) {
      cell.length = (cell.end - cell.start).norm();
    } else {
      const QuadratureRule& g = gauss_legendre(16);
      cell.length = g.integrate([&](double u) { return at(cell, u).jacobian; });
    }
  };

  if (boundary_.is_parametric()) {
    const double h = kTwoPi / n;
    cells_.reserve(2 * n);
    for (int j = 0; j < n; ++j) {
      const int prev = (j + n - 1) % n;
      const int next = (j + 1) % n;
      panel_params_(j) = j * h;
      midpoint_params_(j) = (j + 0.5) * h;
      node_params_(j) = (j + 0.5) * h;

      Cell first;
      first.panel = j;
      first.t0 = j * h;
      first.t1 = (j + 0.5) * h;
      first.nodes = {prev, j};
      first.value_start = {0.5, 0.5};
      first.value_end = {0.0, 1.0};
      finish_cell(first);

      Cell second;
      second.panel = j;
      second.t0 = (j + 0.5) * h;
      second.t1 = (j + 1) * h;
      second.nodes = {j, next};
      second.value_start = {1.0, 0.0};
      second.value_end = {0.5, 0.5};
      finish_cell(second);

      cells_.push_back(first);
      cells_.push_back(second);
      spaces_.node_panels[j] = {prev, j, next};

      const CurvePoint mid = boundary_.evaluate(midpoint_params_(j));
      starts_.col(j) = boundary_.evaluate(panel_params_(j)).point;
      midpoints_.col(j) = mid.point;
      normals_.col(j) = outward_normal(mid.tangent);
      nodes_.col(j) = mid.point;
      lengths_(j) = first.length + second.length;
    }
  } else {
    const int nv = static_cast<int>(boundary_.vertices().size());
    const int per_edge = n / nv;
    cells_.reserve(n);
    for (int j = 0; j < n; ++j) {
      const int edge = j / per_edge;
      const int local = j % per_edge;
      Cell cell;
      cell.panel = j;
      cell.edge = edge;
      cell.t0 = edge + static_cast<double>(local) / per_edge;
      cell.t1 = edge + static_cast<double>(local + 1) / per_edge;
      cell.nodes = {j, (j + 1) % n};
      cell.value_start = {1.0, 0.0};
      cell.value_end = {0.0, 1.0};
      finish_cell(cell);
      cells_.push_back(cell);

      panel_params_(j) = cell.t0;
      midpoint_params_(j) = 0.5 * (cell.t0 + cell.t1);
      node_params_(j) = cell.t0;
      starts_.col(j) = cell.start;
      midpoints_.col(j) = 0.5 * (cell.start + cell.end);
      normals_.col(j) = outward_normal(cell.end - cell.start);
      nodes_.col(j) = cell.start;
      lengths_(j) = cell.length;
      spaces_.node_panels[j] = {(j + n - 1) % n, j};
    }
  }
}

CellPoint Mesh::at(const Cell& cell, double u) const {
  const double dt = cell.t1 - cell.t0;
  const CurvePoint cp = boundary_.evaluate(cell.t0 + u * dt, cell.edge);
  const Eigen::Vector2d d = cp.tangent * dt;
  CellPoint out;
  out.x = cp.point;
  out.jacobian = d.norm();
  out.normal = Eigen::Vector2d(d.y(), -d.x()) / out.jacobian;
  return out;
}

bool Mesh::adjacent(int a, int b) const {
  const int c = static_cast<int>(cells_.size());
  return a != b && ((a + 1) % c == b || (b + 1) % c == a);
}

Mesh build_mesh(const Boundary& boundary, int panel_count) { return Mesh(boundary, panel_count); }

double distance_to_boundary(const Point& p, const Boundary& boundary) {
  switch (boundary.kind()) {
    case BoundaryKind::circle:
      return std::abs((p - boundary.center()).norm() - boundary.radius());
    case BoundaryKind::polygon: {
      const auto& v = boundary.vertices();
      double best = std::numeric_limits<double>::max();
      for (std::size_t i = 0; i < v.size(); ++i) {
        best = std::min(best, segment_distance(p, v[i], v[(i + 1) % v.size()]));
      }
      return best;
    }
    case BoundaryKind::smooth: {
      const double t = closest_parameter(boundary, p);
      return (boundary.evaluate(t).point - p).norm();
    }
  }
  return 0.0;
}

namespace {

bool inside(const Point& p, const Boundary& boundary) {
  switch (boundary.kind()) {
    case BoundaryKind::circle:
      return (p - boundary.center()).norm() < boundary.radius();
    case BoundaryKind::polygon:
      return polygon_contains(boundary.vertices(), p);
    case BoundaryKind::smooth: {
      const double t = closest_parameter(boundary, p);
      const CurvePoint cp = boundary.evaluate(t);
      if ((cp.point - p).norm() < 0.05) {
        return (p - cp.point).dot(outward_normal(cp.tangent)) < 0.0;
      }
      // Winding number of a fine inscribed polygon; its deviation from the
      // curve is far below the 0.05 band handled above.
      constexpr int samples = 2048;
      double winding = 0.0;
      Eigen::Vector2d prev = boundary.evaluate(0.0).point - p;
      for (int i = 1; i <= samples; ++i) {
        const Eigen::Vector2d cur = boundary.evaluate(kTwoPi * i / samples).point - p;
        winding += std::atan2(cross(prev, cur), prev.dot(cur));
        prev = cur;
      }
      return std::abs(winding) > std::numbers::pi;
    }
  }
  return false;
}

}  // namespace

Region locate_point(const Point& p, std::span<const Boundary> boundaries) {
  Region region;
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    if (distance_to_boundary(p, boundaries[i]) < 1e-9) {
      throw ConfigError("point lies on a boundary");
    }
    if (inside(p, boundaries[i])) region.obstacle = static_cast<int>(i);
  }
  return region;
}

}  // namespace tdbem

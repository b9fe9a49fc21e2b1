// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "tdbem/analytic_data.hpp"
#include "tdbem/geometry.hpp"
#include "tdbem/transmission.hpp"

namespace tdbem {

enum class Experiment { smooth_convergence, polygon_convergence, scatter, single };

enum class Geometry { smooth, polygon, circle };

struct CircleSpec {
  Point center = Point::Zero();
  double radius = 1.0;
  double kappa = 1.0;
  double c = 1.0;
};

/// Everything a run needs. default_config() fills in the values of the
/// manufactured-solution studies and the four-circle demo; the demo values
/// (positions, radii, pulse, frame times) are illustrative.
struct RunConfig {
  Experiment experiment = Experiment::smooth_convergence;
  /// (N, M) pairs for the convergence studies.
  std::vector<std::pair<int, int>> levels;
  double T = 4.0;

  // manufactured solution (convergence and single runs)
  Geometry geometry = Geometry::smooth;
  double kappa = 0.8;
  double c = 1.2 / std::sqrt(0.8);
  double t0 = 2.2;
  Eigen::Vector2d direction = Eigen::Vector2d(1.0, -1.0).normalized();
  std::vector<Point> observation;

  // single run and scatter demo
  int N = 50;
  int M = 50;

  // scatter demo
  std::vector<CircleSpec> circles;
  PulseShape pulse = PulseShape::bump;
  double pulse_width = 0.5;
  double amplitude = 1.0;
  std::vector<double> frames;
  int pixels = 81;
  double extent = 4.0;
  double mask = 0.25;  ///< in units of the largest panel length

  double cq_eps = 1e-14;
  int quad_order = 6;
  int threads = 0;
  RhsScaling rhs_scaling = RhsScaling::consistent;
  std::filesystem::path out = "out";

  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

RunConfig default_config(Experiment experiment);

/// Flat `key = value` text, `#` starts a comment. The `experiment` key picks
/// the defaults the remaining keys override, wherever it appears.
RunConfig parse_config(std::istream& in);
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Every key with its resolved value, parseable by parse_config.
std::string format_config(const RunConfig& config);

/// Apply one `key = value` assignment.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// "50,100" (M from the pairing rule of the experiment) or "8:300,16:600".
std::vector<std::pair<int, int>> parse_levels(const std::string& text, Experiment experiment);

std::string to_string(Experiment experiment);
std::string to_string(Geometry geometry);

/// The manufactured plane wave, its obstacle and the observation points.
struct ManufacturedCase {
  Boundary boundary;
  MaterialParams material;
  PlaneWavePulse wave;
  std::vector<Point> observation;
  ErrorNorm norm;
};
ManufacturedCase manufactured_case(const RunConfig& config);

struct ConvergenceRow {
  int N = 0;
  int M = 0;
  double e_phi = 0.0;
  double e_lambda = 0.0;
  double e_u = 0.0;
  /// NaN on the first row.
  double ecr_phi = 0.0;
  double ecr_lambda = 0.0;
  double ecr_u = 0.0;
};

/// Solve each level, compute final-time relative errors and rates. Writes
/// table.csv and config.resolved when config.out is non-empty. Failures are
/// rethrown as std::runtime_error naming the level.
std::vector<ConvergenceRow> run_convergence(const RunConfig& config, std::ostream* log = nullptr);

void write_table(std::ostream& out, const std::vector<ConvergenceRow>& rows);

struct SingleRun {
  CQGrid grid;
  DensityHistory history;
  ErrorMetrics final_errors;
  std::vector<Point> observation;
};

/// Manufactured solve on one mesh. Writes lambda.csv, phi.csv,
/// observation.csv, errors.csv and config.resolved when config.out is set.
SingleRun run_single(const RunConfig& config);

struct Frame {
  double time = 0.0;
  Eigen::VectorXd value;  ///< NaN where masked
  std::vector<int> region;
};

struct ScatterRun {
  std::vector<Point> pixels;
  std::vector<Frame> frames;
};

/// Circles hit by a plane pulse. Frame values are the total field: incident
/// plus scattered outside, transmitted inside. Writes frames/frame_<i>.csv,
/// index.csv and config.resolved when config.out is set.
ScatterRun run_scatter(const RunConfig& config, std::ostream* log = nullptr);

}  // namespace tdbem

// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdbem/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tdbem {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw ConfigError(key + ": not a number: '" + text + "'");
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key + ": not an integer: '" + text + "'");
  return static_cast<int>(v);
}

std::vector<double> to_doubles(const std::string& key, const std::string& text, char sep = ',') {
  std::vector<double> v;
  for (const std::string& p : split(text, sep)) v.push_back(to_double(key, p));
  return v;
}

Point to_point(const std::string& key, const std::string& text) {
  const std::vector<double> v = to_doubles(key, text);
  if (v.size() != 2) throw ConfigError(key + ": expected two comma separated numbers");
  return Point(v[0], v[1]);
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

Experiment parse_experiment(const std::string& text) {
  if (text == "smooth-convergence") return Experiment::smooth_convergence;
  if (text == "polygon-convergence") return Experiment::polygon_convergence;
  if (text == "scatter-demo" || text == "scatter") return Experiment::scatter;
  if (text == "single-run" || text == "single") return Experiment::single;
  throw ConfigError("unknown experiment '" + text + "'");
}

std::string sci(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", v);
  return buf;
}

void write_config_file(const RunConfig& config) {
  std::filesystem::create_directories(config.out);
  RunConfig resolved = config;
  if (resolved.observation.empty() && resolved.experiment != Experiment::scatter) {
    resolved.observation = manufactured_case(config).observation;
  }
  std::ofstream f(config.out / "config.resolved");
  f << format_config(resolved);
  if (!f) throw std::runtime_error("cannot write " + (config.out / "config.resolved").string());
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << std::setprecision(17);
  return f;
}

AssemblyOptions assembly_options(const RunConfig& config) {
  AssemblyOptions opts;
  opts.order = config.quad_order;
  return opts;
}

}  // namespace

std::string to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::smooth_convergence: return "smooth-convergence";
    case Experiment::polygon_convergence: return "polygon-convergence";
    case Experiment::scatter: return "scatter-demo";
    case Experiment::single: return "single-run";
  }
  return {};
}

std::string to_string(Geometry geometry) {
  switch (geometry) {
    case Geometry::smooth: return "smooth";
    case Geometry::polygon: return "polygon";
    case Geometry::circle: return "circle";
  }
  return {};
}

RunConfig default_config(Experiment experiment) {
  RunConfig c;
  c.experiment = experiment;
  switch (experiment) {
    case Experiment::smooth_convergence:
      c.levels = {{50, 50}, {100, 100}, {200, 200}, {400, 400}};
      break;
    case Experiment::polygon_convergence:
      c.geometry = Geometry::polygon;
      c.levels = {{8, 300}, {16, 600}, {32, 1200}};
      break;
    case Experiment::single:
      break;
    case Experiment::scatter: {
      // Illustrative layout: unit circles at (+-2, +-2), fast material on the
      // NE/SW diagonal, slow on NW/SE, short bump travelling along +x.
      c.T = 9.0;
      c.N = 32;
      c.M = 180;
      c.t0 = 4.5;
      c.direction = Eigen::Vector2d(1.0, 0.0);
      const double fast = 2.0, slow = 0.5;
      c.circles = {{Point(2.0, 2.0), 1.0, 1.0, fast},
                   {Point(-2.0, 2.0), 1.0, 1.0, slow},
                   {Point(-2.0, -2.0), 1.0, 1.0, fast},
                   {Point(2.0, -2.0), 1.0, 1.0, slow}};
      c.frames = {1.5, 3.0, 4.5, 6.0, 7.5, 9.0};
      break;
    }
  }
  return c;
}

std::vector<std::pair<int, int>> parse_levels(const std::string& text, Experiment experiment) {
  std::vector<std::pair<int, int>> levels;
  for (const std::string& item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon != std::string::npos) {
      levels.emplace_back(to_int("levels", trim(item.substr(0, colon))),
                          to_int("levels", trim(item.substr(colon + 1))));
      continue;
    }
    const int n = to_int("levels", item);
    if (experiment == Experiment::polygon_convergence) {
      if (n % 2 != 0) throw ConfigError("levels: polygon N must be even (M = 37.5 N)");
      levels.emplace_back(n, n / 2 * 75);
    } else {
      levels.emplace_back(n, n);
    }
  }
  return levels;
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "experiment") {
    c.experiment = parse_experiment(value);
  } else if (key == "levels") {
    c.levels = parse_levels(value, c.experiment);
  } else if (key == "T") {
    c.T = to_double(key, value);
  } else if (key == "geometry") {
    if (value == "smooth") c.geometry = Geometry::smooth;
    else if (value == "polygon") c.geometry = Geometry::polygon;
    else if (value == "circle") c.geometry = Geometry::circle;
    else throw ConfigError("unknown geometry '" + value + "'");
  } else if (key == "kappa") {
    c.kappa = to_double(key, value);
  } else if (key == "c") {
    c.c = to_double(key, value);
  } else if (key == "t0") {
    c.t0 = to_double(key, value);
  } else if (key == "direction") {
    const Point d = to_point(key, value);
    if (!(d.norm() > 0.0)) throw ConfigError("direction must be non-zero");
    // already-unit input is kept bit for bit so resolved configs round trip
    c.direction = std::abs(d.norm() - 1.0) < 1e-15 ? d : d.normalized();
  } else if (key == "observation") {
    c.observation.clear();
    for (const std::string& p : split(value, ';')) c.observation.push_back(to_point(key, p));
  } else if (key == "N") {
    c.N = to_int(key, value);
  } else if (key == "M") {
    c.M = to_int(key, value);
  } else if (key == "circles") {
    c.circles.clear();
    for (const std::string& item : split(value, ';')) {
      const std::vector<double> v = to_doubles(key, item);
      if (v.size() != 5) throw ConfigError("circles: each entry is x, y, radius, kappa, c");
      c.circles.push_back({Point(v[0], v[1]), v[2], v[3], v[4]});
    }
  } else if (key == "pulse") {
    if (value == "bump") c.pulse = PulseShape::bump;
    else if (value == "windowed-sine") c.pulse = PulseShape::windowed_sine;
    else throw ConfigError("unknown pulse '" + value + "'");
  } else if (key == "pulse_width") {
    c.pulse_width = to_double(key, value);
  } else if (key == "amplitude") {
    c.amplitude = to_double(key, value);
  } else if (key == "frames") {
    c.frames = to_doubles(key, value);
  } else if (key == "pixels") {
    c.pixels = to_int(key, value);
  } else if (key == "extent") {
    c.extent = to_double(key, value);
  } else if (key == "mask") {
    c.mask = to_double(key, value);
  } else if (key == "cq_eps") {
    c.cq_eps = to_double(key, value);
  } else if (key == "quad_order") {
    c.quad_order = to_int(key, value);
  } else if (key == "threads") {
    c.threads = to_int(key, value);
  } else if (key == "rhs_scaling") {
    if (value == "consistent") c.rhs_scaling = RhsScaling::consistent;
    else if (value == "alternate") c.rhs_scaling = RhsScaling::alternate;
    else throw ConfigError("unknown rhs_scaling '" + value + "'");
  } else if (key == "out") {
    c.out = value;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

RunConfig parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::map<std::string, int> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (seen[key]++ > 0) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    entries.emplace_back(key, trim(line.substr(eq + 1)));
  }
  Experiment experiment = Experiment::smooth_convergence;
  for (const auto& [k, v] : entries) {
    if (k == "experiment") experiment = parse_experiment(v);
  }
  RunConfig config = default_config(experiment);
  // levels depend on the experiment only, so order is irrelevant otherwise
  for (const auto& [k, v] : entries) set_config_value(config, k, v);
  config.validate();
  return config;
}

RunConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_config(in);
}

std::string format_config(const RunConfig& c) {
  std::ostringstream s;
  s << "experiment = " << to_string(c.experiment) << "\n";
  s << "levels = ";
  for (std::size_t i = 0; i < c.levels.size(); ++i) {
    s << (i ? "," : "") << c.levels[i].first << ":" << c.levels[i].second;
  }
  s << "\n";
  s << "T = " << num(c.T) << "\n";
  s << "geometry = " << to_string(c.geometry) << "\n";
  s << "kappa = " << num(c.kappa) << "\n";
  s << "c = " << num(c.c) << "\n";
  s << "t0 = " << num(c.t0) << "\n";
  s << "direction = " << num(c.direction.x()) << "," << num(c.direction.y()) << "\n";
  s << "observation = ";
  for (std::size_t i = 0; i < c.observation.size(); ++i) {
    s << (i ? "; " : "") << num(c.observation[i].x()) << "," << num(c.observation[i].y());
  }
  s << "\n";
  s << "N = " << c.N << "\n";
  s << "M = " << c.M << "\n";
  s << "circles = ";
  for (std::size_t i = 0; i < c.circles.size(); ++i) {
    const CircleSpec& k = c.circles[i];
    s << (i ? "; " : "") << num(k.center.x()) << "," << num(k.center.y()) << "," << num(k.radius) << ","
      << num(k.kappa) << "," << num(k.c);
  }
  s << "\n";
  s << "pulse = " << (c.pulse == PulseShape::bump ? "bump" : "windowed-sine") << "\n";
  s << "pulse_width = " << num(c.pulse_width) << "\n";
  s << "amplitude = " << num(c.amplitude) << "\n";
  s << "frames = ";
  for (std::size_t i = 0; i < c.frames.size(); ++i) s << (i ? "," : "") << num(c.frames[i]);
  s << "\n";
  s << "pixels = " << c.pixels << "\n";
  s << "extent = " << num(c.extent) << "\n";
  s << "mask = " << num(c.mask) << "\n";
  s << "cq_eps = " << num(c.cq_eps) << "\n";
  s << "quad_order = " << c.quad_order << "\n";
  s << "threads = " << c.threads << "\n";
  s << "rhs_scaling = " << (c.rhs_scaling == RhsScaling::consistent ? "consistent" : "alternate") << "\n";
  s << "out = " << c.out.string() << "\n";
  return s.str();
}

void RunConfig::validate() const {
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  if (!(cq_eps > 0.0 && cq_eps < 1.0)) throw ConfigError("cq_eps must lie in (0, 1)");
  if (quad_order < 2 || quad_order > 16) throw ConfigError("quad_order must lie in [2, 16]");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  MaterialParams{kappa, c}.validate();
  switch (experiment) {
    case Experiment::smooth_convergence:
    case Experiment::polygon_convergence:
      if (levels.empty()) throw ConfigError("levels must not be empty");
      for (const auto& [n, m] : levels) {
        if (n < 2 || m < 2) throw ConfigError("levels: N and M must be >= 2");
        if (experiment == Experiment::smooth_convergence && n != m) {
          throw ConfigError("levels: smooth-convergence requires N = M");
        }
        if (experiment == Experiment::polygon_convergence && 2 * m != 75 * n) {
          throw ConfigError("levels: polygon-convergence requires M = 37.5 N");
        }
      }
      for (std::size_t i = 1; i < levels.size(); ++i) {
        if (levels[i].first <= levels[i - 1].first) throw ConfigError("levels: N must increase");
      }
      break;
    case Experiment::single:
      if (N < 2 || M < 2) throw ConfigError("N and M must be >= 2");
      break;
    case Experiment::scatter:
      if (N < 2 || M < 2) throw ConfigError("N and M must be >= 2");
      if (circles.empty()) throw ConfigError("circles must not be empty");
      for (const CircleSpec& k : circles) {
        if (!(k.radius > 0.0)) throw ConfigError("circles: radius must be positive");
        MaterialParams{k.kappa, k.c}.validate();
      }
      for (std::size_t i = 0; i < circles.size(); ++i) {
        for (std::size_t j = i + 1; j < circles.size(); ++j) {
          if ((circles[i].center - circles[j].center).norm() <= circles[i].radius + circles[j].radius) {
            throw ConfigError("circles must be disjoint");
          }
        }
      }
      if (!(pulse_width > 0.0)) throw ConfigError("pulse_width must be positive");
      if (pixels < 2) throw ConfigError("pixels must be >= 2");
      if (!(extent > 0.0)) throw ConfigError("extent must be positive");
      if (!(mask >= 0.0)) throw ConfigError("mask must be >= 0");
      for (double t : frames) {
        if (t < 0.0 || t > T) throw ConfigError("frames must lie in [0, T]");
      }
      break;
  }
}

ManufacturedCase manufactured_case(const RunConfig& config) {
  ManufacturedCase mc{Boundary::smooth_square(), MaterialParams{config.kappa, config.c}, {}, {},
                      ErrorNorm::nodal_max};
  switch (config.geometry) {
    case Geometry::smooth:
      mc.observation = {{0.0, 0.0}, {0.5, 0.5}, {-0.5, 0.5}, {0.5, -0.5}, {-0.5, -0.5}};
      break;
    case Geometry::polygon:
      mc.boundary = Boundary::polygon({{0.0, 0.0}, {1.0, 0.0}, {0.8, 0.8}, {0.2, 1.0}});
      mc.observation = {{0.3, 0.4}, {0.5, 0.7}, {0.65, 0.4}, {0.5, 0.2}};
      mc.norm = ErrorNorm::l2;
      break;
    case Geometry::circle:
      mc.boundary = Boundary::circle(Point::Zero(), 1.0);
      mc.observation = {{0.0, 0.0}, {0.4, 0.3}, {-0.3, -0.5}};
      break;
  }
  if (!config.observation.empty()) mc.observation = config.observation;
  mc.wave.speed = mc.material.m();
  mc.wave.direction = config.direction;
  mc.wave.delay = config.t0;
  mc.wave.amplitude = config.amplitude;
  mc.wave.shape = PulseShape::windowed_sine;
  return mc;
}

namespace {

struct LevelResult {
  DensityHistory history;
  ErrorMetrics errors;
  CQGrid grid;
};

LevelResult solve_level(const RunConfig& config, const ManufacturedCase& mc, int n, int m, bool cache) {
  const Mesh mesh(mc.boundary, n);
  const TransmissionProblem problem({Obstacle{mesh, mc.material}}, assembly_options(config),
                                    config.rhs_scaling);
  LevelResult r;
  r.grid = make_grid(config.T, m, config.cq_eps);
  const BoundaryDataSeries data = boundary_data_series(mc.wave, mesh, mc.material.kappa, r.grid);
  SolveOptions opts;
  opts.threads = config.threads;
  opts.cache_spectra = cache;
  r.history = solve_history(problem, data.beta0, data.beta1, r.grid, mc.observation, opts);
  r.errors = error_metrics(r.history.lambda.row(m).transpose(), r.history.phi.row(m).transpose(),
                           r.history.field.row(m).transpose(), mc.wave, mesh, mc.observation, config.T,
                           mc.norm);
  return r;
}

}  // namespace

std::vector<ConvergenceRow> run_convergence(const RunConfig& config, std::ostream* log) {
  config.validate();
  if (config.experiment != Experiment::smooth_convergence &&
      config.experiment != Experiment::polygon_convergence) {
    throw ConfigError("run_convergence needs a convergence experiment");
  }
  const ManufacturedCase mc = manufactured_case(config);
  std::vector<ConvergenceRow> rows;
  for (const auto& [n, m] : config.levels) {
    LevelResult r;
    try {
      r = solve_level(config, mc, n, m, false);
    } catch (const std::exception& e) {
      throw std::runtime_error("level N=" + std::to_string(n) + " M=" + std::to_string(m) + ": " + e.what());
    }
    ConvergenceRow row;
    row.N = n;
    row.M = m;
    row.e_phi = r.errors.rel_phi;
    row.e_lambda = r.errors.rel_lambda;
    row.e_u = r.errors.rel_u;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.ecr_phi = row.ecr_lambda = row.ecr_u = nan;
    if (!rows.empty()) {
      const ConvergenceRow& p = rows.back();
      row.ecr_phi = ecr(p.e_phi, row.e_phi, p.N, n);
      row.ecr_lambda = ecr(p.e_lambda, row.e_lambda, p.N, n);
      row.ecr_u = ecr(p.e_u, row.e_u, p.N, n);
    }
    rows.push_back(row);
    if (log) {
      *log << "N=" << n << " M=" << m << " E_phi=" << sci(row.e_phi) << " E_lambda=" << sci(row.e_lambda)
           << " E_u=" << sci(row.e_u) << std::endl;
    }
  }
  if (!config.out.empty()) {
    write_config_file(config);
    std::ofstream f = open_output(config.out / "table.csv");
    write_table(f, rows);
  }
  return rows;
}

void write_table(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
  out << "N,M,E_phi,ecr_phi,E_lambda,ecr_lambda,E_u,ecr_u\n";
  for (const ConvergenceRow& r : rows) {
    out << r.N << "," << r.M << "," << sci(r.e_phi) << "," << sci(r.ecr_phi) << "," << sci(r.e_lambda) << ","
        << sci(r.ecr_lambda) << "," << sci(r.e_u) << "," << sci(r.ecr_u) << "\n";
  }
}

SingleRun run_single(const RunConfig& config) {
  config.validate();
  const ManufacturedCase mc = manufactured_case(config);
  LevelResult r = solve_level(config, mc, config.N, config.M, false);
  SingleRun run{r.grid, std::move(r.history), r.errors, mc.observation};
  if (config.out.empty()) return run;

  write_config_file(config);
  auto series = [&](const std::string& name, const Eigen::MatrixXd& values, const std::string& prefix) {
    std::ofstream f = open_output(config.out / name);
    f << "t";
    for (Eigen::Index j = 0; j < values.cols(); ++j) f << "," << prefix << j;
    f << "\n";
    for (Eigen::Index n = 0; n < values.rows(); ++n) {
      f << run.grid.time(static_cast<int>(n));
      for (Eigen::Index j = 0; j < values.cols(); ++j) f << "," << values(n, j);
      f << "\n";
    }
  };
  series("lambda.csv", run.history.lambda, "lambda_");
  series("phi.csv", run.history.phi, "phi_");
  series("observation.csv", run.history.field, "u_");
  std::ofstream f = open_output(config.out / "errors.csv");
  f << "E_phi,E_lambda,E_u,imaginary_residual\n"
    << run.final_errors.rel_phi << "," << run.final_errors.rel_lambda << "," << run.final_errors.rel_u << ","
    << run.history.imaginary_residual << "\n";
  return run;
}

ScatterRun run_scatter(const RunConfig& config, std::ostream* log) {
  config.validate();
  if (config.experiment != Experiment::scatter) throw ConfigError("run_scatter needs a scatter-demo config");

  std::vector<Obstacle> obstacles;
  for (const CircleSpec& k : config.circles) {
    obstacles.push_back({Mesh(Boundary::circle(k.center, k.radius), config.N), MaterialParams{k.kappa, k.c}});
  }
  const TransmissionProblem problem(obstacles, assembly_options(config), config.rhs_scaling);
  const CQGrid grid = make_grid(config.T, config.M, config.cq_eps);

  PlaneWavePulse incident;
  incident.speed = 1.0;
  incident.direction = config.direction;
  incident.delay = config.t0;
  incident.amplitude = config.amplitude;
  incident.shape = config.pulse;
  incident.width = config.pulse_width;

  // Jump data: the incident trace and its normal derivative.
  Eigen::MatrixXd beta0(grid.M + 1, problem.data_size());
  Eigen::MatrixXd beta1(grid.M + 1, problem.data_size());
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const BoundaryDataSeries d = boundary_data_series(incident, obstacles[i].mesh, 1.0, grid);
    const int off = problem.data_offsets()[i];
    beta0.middleCols(off, d.beta0.cols()) = d.beta0;
    beta1.middleCols(off, d.beta1.cols()) = d.beta1;
  }

  SolveOptions opts;
  opts.threads = config.threads;
  opts.cache_spectra = true;
  const DensityHistory history = solve_history(problem, beta0, beta1, grid, {}, opts);
  if (log) *log << "densities solved, imaginary residual " << history.imaginary_residual << std::endl;

  // Pixel grid, masked near the boundaries.
  double panel = 0.0;
  for (const Obstacle& o : obstacles) panel = std::max(panel, o.mesh.max_panel_length());
  const double mask = config.mask * panel;
  ScatterRun run;
  std::vector<Point> active;
  std::vector<int> active_index;
  std::vector<int> region_of;
  std::vector<Region> active_regions;
  std::vector<Boundary> boundaries;
  for (const Obstacle& o : obstacles) boundaries.push_back(o.mesh.boundary());
  const int np = config.pixels;
  for (int iy = 0; iy < np; ++iy) {
    for (int ix = 0; ix < np; ++ix) {
      const Point p(-config.extent + 2.0 * config.extent * ix / (np - 1),
                    -config.extent + 2.0 * config.extent * iy / (np - 1));
      double d = std::numeric_limits<double>::infinity();
      for (const Boundary& b : boundaries) d = std::min(d, distance_to_boundary(p, b));
      const int pixel = static_cast<int>(run.pixels.size());
      run.pixels.push_back(p);
      if (d < std::max(mask, 1e-6)) {
        // still label the pixel; a point on the curve itself counts as exterior
        region_of.push_back(d > 1e-8 ? locate_point(p, boundaries).obstacle : Region::kExterior);
        continue;
      }
      const Region r = locate_point(p, boundaries);
      region_of.push_back(r.obstacle);
      active.push_back(p);
      active_index.push_back(pixel);
      active_regions.push_back(r);
    }
  }

  const Eigen::MatrixXd scattered = field_history(problem, history, grid, active, active_regions, opts);
  if (log) *log << "field evaluated at " << active.size() << " pixels" << std::endl;

  for (double t : config.frames) {
    const int n = std::clamp(static_cast<int>(std::lround(t / grid.k)), 0, grid.M);
    Frame frame;
    frame.time = grid.time(n);
    frame.value = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(run.pixels.size()),
                                            std::numeric_limits<double>::quiet_NaN());
    frame.region = region_of;
    for (std::size_t a = 0; a < active.size(); ++a) {
      double v = scattered(n, static_cast<Eigen::Index>(a));
      if (active_regions[a].exterior()) v += wave_value(incident, active[a], frame.time);
      frame.value(active_index[a]) = v;
    }
    run.frames.push_back(std::move(frame));
  }

  if (!config.out.empty()) {
    write_config_file(config);
    std::filesystem::create_directories(config.out / "frames");
    std::ofstream index = open_output(config.out / "index.csv");
    index << "index,time,file\n";
    for (std::size_t f = 0; f < run.frames.size(); ++f) {
      const std::string name = "frame_" + std::to_string(f) + ".csv";
      index << f << "," << run.frames[f].time << ",frames/" << name << "\n";
      std::ofstream out = open_output(config.out / "frames" / name);
      out << "x,y,value,region\n";
      for (std::size_t p = 0; p < run.pixels.size(); ++p) {
        out << run.pixels[p].x() << "," << run.pixels[p].y() << ",";
        const double v = run.frames[f].value(static_cast<Eigen::Index>(p));
        if (std::isnan(v)) out << "nan";
        else out << v;
        out << "," << run.frames[f].region[p] << "\n";
      }
    }
  }
  return run;
}

}  // namespace tdbem

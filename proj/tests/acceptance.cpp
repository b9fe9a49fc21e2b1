// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned here.
// Exit status is 0 once every criterion was evaluated; --strict makes any FAIL
// nonzero. A criterion that throws counts as FAIL and also makes the exit
// status nonzero.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "common/brute_force.hpp"
#include "common/circle_oracle.hpp"
#include "common/reference_tables.hpp"
#include "tdbem/analytic_data.hpp"
#include "tdbem/cq.hpp"
#include "tdbem/experiments.hpp"
#include "tdbem/transmission.hpp"

using namespace tdbem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }
std::string fix(double v) { return fmt("%.3f", v); }

double rate(double coarse, double fine, double n_coarse, double n_fine) {
  return ecr(coarse, fine, n_coarse, n_fine);
}

double max_abs(const Eigen::MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

Eigen::MatrixXd stacked(const DensityHistory& h) {
  Eigen::MatrixXd x(h.lambda.rows(), h.lambda.cols() + h.phi.cols());
  x << h.lambda, h.phi;
  return x;
}

// ---- smooth obstacle study -----------------------------------------------

struct SmoothLevel {
  int N = 0;
  ErrorMetrics errors;
  double exterior = 0.0;  ///< max |u| at the exterior probes, exact value 0
};

const std::vector<Point> kExteriorProbes{{2.0, 0.0}, {0.0, 2.0}, {-2.0, 0.0}, {0.0, -2.0}, {1.5, 1.5}};

SmoothLevel smooth_level(int n, int threads) {
  RunConfig config = default_config(Experiment::smooth_convergence);
  const ManufacturedCase mc = manufactured_case(config);
  std::vector<Point> obs = mc.observation;
  obs.insert(obs.end(), kExteriorProbes.begin(), kExteriorProbes.end());

  const Mesh mesh(mc.boundary, n);
  AssemblyOptions assembly;
  assembly.order = config.quad_order;
  const TransmissionProblem problem({Obstacle{mesh, mc.material}}, assembly, config.rhs_scaling);
  const CQGrid grid = make_grid(config.T, n, config.cq_eps);
  const BoundaryDataSeries data = boundary_data_series(mc.wave, mesh, mc.material.kappa, grid);
  SolveOptions opts;
  opts.threads = threads;
  const DensityHistory h = solve_history(problem, data.beta0, data.beta1, grid, obs, opts);

  const int inner = static_cast<int>(mc.observation.size());
  SmoothLevel level;
  level.N = n;
  level.errors = error_metrics(h.lambda.row(n).transpose(), h.phi.row(n).transpose(),
                               h.field.row(n).head(inner).transpose(), mc.wave, mesh, mc.observation,
                               config.T, mc.norm);
  level.exterior = h.field.row(n).tail(kExteriorProbes.size()).cwiseAbs().maxCoeff();
  return level;
}

// Reference value at N, log-log interpolated between bracketing rows.
double reference(int column, int n) {
  const auto& t = oracle::kSmoothTable;
  for (std::size_t r = 0; r < t.size(); ++r) {
    if (t[r][0] == n) return t[r][column];
    if (r > 0 && t[r - 1][0] < n && n < t[r][0]) {
      const double w = std::log(n / t[r - 1][0]) / std::log(t[r][0] / t[r - 1][0]);
      return std::exp((1.0 - w) * std::log(t[r - 1][column]) + w * std::log(t[r][column]));
    }
  }
  return std::nan("");
}

// ---- criteria -----------------------------------------------------------

struct Context {
  int threads = 0;
  std::vector<SmoothLevel> smooth;  // filled by the first smooth criterion
};

void ensure_smooth(Context& ctx) {
  if (!ctx.smooth.empty()) return;
  for (int n : {50, 100, 200, 400}) {
    ctx.smooth.push_back(smooth_level(n, ctx.threads));
    const SmoothLevel& l = ctx.smooth.back();
    std::cerr << "  smooth N=M=" << n << ": E_phi " << sci(l.errors.rel_phi) << ", E_lambda "
              << sci(l.errors.rel_lambda) << ", E_u " << sci(l.errors.rel_u) << ", exterior " << sci(l.exterior)
              << std::endl;
  }
}

Outcome smooth_eu_rate(Context& ctx) {
  ensure_smooth(ctx);
  const auto& s = ctx.smooth;
  Outcome o{true, "E_u ecr"};
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double r = rate(s[i - 1].errors.rel_u, s[i].errors.rel_u, s[i - 1].N, s[i].N);
    o.pass = o.pass && r >= 1.7 && r <= 2.3;
    o.detail += " " + fix(r);
  }
  o.detail += " (window [1.7, 2.3])";
  return o;
}

Outcome smooth_monotone(Context& ctx) {
  ensure_smooth(ctx);
  const auto& s = ctx.smooth;
  Outcome o{true, ""};
  for (std::size_t i = 1; i < s.size(); ++i) {
    o.pass = o.pass && s[i].errors.rel_phi < s[i - 1].errors.rel_phi &&
             s[i].errors.rel_lambda < s[i - 1].errors.rel_lambda;
  }
  o.detail = "E_phi";
  for (const auto& l : s) o.detail += " " + sci(l.errors.rel_phi);
  o.detail += "; E_lambda";
  for (const auto& l : s) o.detail += " " + sci(l.errors.rel_lambda);
  return o;
}

Outcome smooth_magnitude(Context& ctx) {
  ensure_smooth(ctx);
  Outcome o{true, "ours/reference"};
  for (const SmoothLevel& l : ctx.smooth) {
    const double ours[3] = {l.errors.rel_phi, l.errors.rel_lambda, l.errors.rel_u};
    o.detail += " N=" + std::to_string(l.N) + ":";
    for (int c = 0; c < 3; ++c) {
      const double ratio = ours[c] / reference(1 + 2 * c, l.N);
      o.pass = o.pass && ratio >= 0.2 && ratio <= 5.0;
      o.detail += " " + fmt("%.2f", ratio);
    }
  }
  o.detail += " (each in [0.2, 5])";
  return o;
}

Outcome smooth_exterior(Context& ctx) {
  ensure_smooth(ctx);
  const auto& s = ctx.smooth;
  const double r = rate(s.front().exterior, s.back().exterior, s.front().N, s.back().N);
  Outcome o{r >= 1.7 && r <= 2.3, "max |u| at exterior probes"};
  for (const auto& l : s) o.detail += " " + sci(l.exterior);
  o.detail += ", rate 50->400 " + fix(r) + " (window [1.7, 2.3]); pairs";
  for (std::size_t i = 1; i < s.size(); ++i) o.detail += " " + fix(rate(s[i - 1].exterior, s[i].exterior, s[i - 1].N, s[i].N));
  return o;
}

Outcome polygon_rates(Context& ctx) {
  RunConfig config = default_config(Experiment::polygon_convergence);
  config.threads = ctx.threads;
  config.out.clear();
  const auto rows = run_convergence(config, &std::cerr);
  const double r = rows[2].ecr_phi;
  const double drop[3] = {rows[0].e_phi / rows[2].e_phi, rows[0].e_lambda / rows[2].e_lambda,
                          rows[0].e_u / rows[2].e_u};
  Outcome o;
  o.pass = r >= 2.5 && r <= 4.5 && drop[0] >= 4.0 && drop[1] >= 4.0 && drop[2] >= 4.0;
  o.detail = "E_phi ecr 16->32 " + fix(r) + " (window [2.5, 4.5]); 8->32 reductions " + fmt("%.1f", drop[0]) +
             "x " + fmt("%.1f", drop[1]) + "x " + fmt("%.1f", drop[2]) + "x (each >= 4)";
  return o;
}

Outcome circle_oracle(Context&) {
  Outcome o{true, ""};
  double worst_order = 1e9, worst_zero = 0.0;
  for (Complex s : {Complex(1.0, 0.0), Complex(2.0, 3.0)}) {
    for (int n = 0; n <= 3; ++n) {
      std::vector<oracle::CircleModeErrors> e;
      for (int N : {32, 64, 128}) e.push_back(oracle::circle_mode_errors(n, s, N));
      if (n == 0) {
        for (const auto& x : e) worst_zero = std::max({worst_zero, x.V, x.W});
        continue;
      }
      for (std::size_t i = 1; i < e.size(); ++i) {
        worst_order = std::min({worst_order, std::log2(e[i - 1].V / e[i].V), std::log2(e[i - 1].W / e[i].W)});
      }
    }
  }
  o.pass = worst_order >= 1.8 && worst_zero <= 1e-6;
  o.detail = "min observed order (V, W; n = 1..3) " + fix(worst_order) + " (>= 1.8); n = 0 max error " +
             sci(worst_zero) + " (<= 1e-6, no discretization error in that mode)";
  return o;
}

Eigen::VectorXd apply_symbol(const std::function<Complex(Complex)>& f, const Eigen::VectorXd& g,
                             const CQGrid& grid) {
  Eigen::MatrixXcd spec = forward_transform(g, grid);
  for (int l = 0; l < grid.n_freq; ++l) spec(l, 0) *= f(grid.frequencies[l]);
  return inverse_transform(spec, grid);
}

Outcome cq_oracle(Context&) {
  const int M = 16;
  const CQGrid g = make_grid(2.0, M, 1e-18);
  Eigen::VectorXd x(M + 1);
  for (int n = 0; n <= M; ++n) x(n) = std::sin(2.0 * g.time(n)) * g.time(n);
  const std::vector<std::function<Complex(Complex)>> symbols{
      [](Complex s) { return 1.0 / s; }, [](Complex s) { return 1.0 / (s * s); },
      [](Complex s) { return std::exp(-s / 2.0) / s; }};
  double diff = 0.0;
  for (const auto& f : symbols) {
    const Eigen::VectorXd y = apply_symbol(f, x, g);
    const auto w = cq_weights_direct(f, g, M);
    for (int n = 0; n <= M; ++n) {
      Complex conv = 0.0;
      for (int j = 0; j <= n; ++j) conv += w[j] * x(n - j);
      diff = std::max(diff, std::abs(conv - y(n)));
    }
  }
  auto error = [](int m) {
    const CQGrid grid = make_grid(1.0, m);
    Eigen::VectorXd t2(m + 1);
    for (int n = 0; n <= m; ++n) t2(n) = grid.time(n) * grid.time(n);
    const Eigen::VectorXd y = apply_symbol([](Complex s) { return 1.0 / s; }, t2, grid);
    double e = 0.0;
    for (int n = 0; n <= m; ++n) e = std::max(e, std::abs(y(n) - std::pow(grid.time(n), 3) / 3.0));
    return e;
  };
  const double ratio = error(64) / error(128);
  return {diff <= 1e-8 && ratio >= 3.4 && ratio <= 4.6,
          "pipeline vs weights max diff " + sci(diff) + " (<= 1e-8, eps 1e-18); 1/s on t^2 error ratio M=64/128 " +
              fix(ratio) + " (window [3.4, 4.6])"};
}

const MaterialParams kMaterial{0.8, 1.2 / std::sqrt(0.8)};

PlaneWavePulse interior_wave() {
  PlaneWavePulse p;
  p.speed = kMaterial.m();
  p.direction = Eigen::Vector2d(1.0, -1.0).normalized();
  p.delay = 2.2;
  return p;
}

Outcome structural(Context& ctx) {
  const Mesh mesh(Boundary::smooth_square(), 40);
  double sym = 0.0;
  for (Complex s : {Complex(1.0, 0.0), Complex(0.5, 2.0), Complex(3.0, -1.0)}) {
    const OperatorSet ops = assemble_operators(s, mesh);
    const double scale = std::max({max_abs(ops.V), max_abs(ops.K), max_abs(ops.W)});
    sym = std::max({sym, max_abs(ops.J - ops.K.transpose()) / scale, max_abs(ops.V - ops.V.transpose()) / scale,
                    max_abs(ops.W - ops.W.transpose()) / scale});
  }

  const Complex s(1.5, 2.0);
  const BlockSystem sys = assemble_block(s, mesh, {1.0, 1.0});
  const OperatorSet ops = assemble_operators(s, mesh);
  const int n = mesh.size();
  Eigen::MatrixXcd expect(2 * n, 2 * n);
  expect << 2.0 * ops.V, -2.0 * ops.K, 2.0 * ops.J, 2.0 * ops.W;
  const double degenerate = max_abs(sys.matrix - expect) / max_abs(expect);

  SolveOptions opts;
  opts.threads = ctx.threads;
  double linear = 0.0;
  {
    const Mesh m(Boundary::smooth_square(), 24);
    const TransmissionProblem problem({Obstacle{m, kMaterial}});
    const CQGrid grid = make_grid(3.0, 30);
    std::mt19937 gen(12);
    std::normal_distribution<double> g;
    auto random = [&] {
      Eigen::MatrixXd r(31, 24);
      for (auto& x : r.reshaped()) x = g(gen);
      return r;
    };
    const Eigen::MatrixXd a0 = random(), a1 = random(), b0 = random(), b1 = random();
    const std::vector<Point> obs{{0.0, 0.0}, {2.5, 1.0}};
    const DensityHistory ha = solve_history(problem, a0, a1, grid, obs, opts);
    const DensityHistory hb = solve_history(problem, b0, b1, grid, obs, opts);
    const DensityHistory hc = solve_history(problem, a0 - 3.0 * b0, a1 - 3.0 * b1, grid, obs, opts);
    const Eigen::MatrixXd e = stacked(ha) - 3.0 * stacked(hb);
    const Eigen::MatrixXd fe = ha.field - 3.0 * hb.field;
    linear = std::max((stacked(hc) - e).cwiseAbs().maxCoeff() / e.cwiseAbs().maxCoeff(),
                      (hc.field - fe).cwiseAbs().maxCoeff() / fe.cwiseAbs().maxCoeff());
  }

  double causal = 0.0;
  {
    const Mesh m(Boundary::smooth_square(), 30);
    const TransmissionProblem problem({Obstacle{m, kMaterial}});
    const CQGrid grid = make_grid(4.0, 80);
    const BoundaryDataSeries data = boundary_data_series(interior_wave(), m, kMaterial.kappa, grid);
    int last_zero = -1;
    while (last_zero + 1 <= grid.M && data.beta0.row(last_zero + 1).isZero(0.0) &&
           data.beta1.row(last_zero + 1).isZero(0.0)) {
      ++last_zero;
    }
    const DensityHistory h = solve_history(problem, data.beta0, data.beta1, grid, {}, opts);
    const Eigen::MatrixXd x = stacked(h);
    // a few steps of BDF2 smearing before the onset are allowed
    causal = x.topRows(std::max(last_zero - 4 + 1, 1)).cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff();
  }

  return {sym <= 1e-13 && degenerate <= 1e-13 && linear <= 1e-8 && causal <= 1e-4,
          "J-K^T, V-V^T, W-W^T " + sci(sym) + " (<= 1e-13); equal-speed block " + sci(degenerate) +
              " (<= 1e-13); linearity " + sci(linear) + " (<= 1e-8); before onset " + sci(causal) + " (<= 1e-4)"};
}

Outcome brute_force(Context&) {
  const Mesh mesh(Boundary::circle(Point::Zero(), 1.0), 8);
  const TransmissionProblem problem({Obstacle{mesh, kMaterial}});
  const CQGrid grid = make_grid(4.0, 12, 1e-16);
  const BoundaryDataSeries data = boundary_data_series(interior_wave(), mesh, kMaterial.kappa, grid);
  const DensityHistory h = solve_history(problem, data.beta0, data.beta1, grid, {});
  const Eigen::MatrixXd brute = oracle::brute_force_history(problem, data.beta0, data.beta1, grid);
  const double d = (stacked(h) - brute).cwiseAbs().maxCoeff() / brute.cwiseAbs().maxCoeff();
  return {d <= 1e-6, "circle N=8 M=12 relative max diff " + sci(d) + " (<= 1e-6)"};
}

template <std::size_t R>
double worst_ecr(const std::array<std::array<double, 7>, R>& t) {
  double worst = 0.0;
  for (std::size_t r = 1; r < R; ++r) {
    for (int c : {1, 3, 5}) worst = std::max(worst, std::abs(ecr(t[r - 1][c], t[r][c], t[r - 1][0], t[r][0]) - t[r][c + 1]));
  }
  return worst;
}

Outcome ecr_fixtures(Context&) {
  const double w = std::max(worst_ecr(oracle::kSmoothTable), worst_ecr(oracle::kPolygonTable));
  return {w <= 0.002, "worst |ecr - tabulated| over all adjacent pairs " + fmt("%.2e", w) + " (<= 0.002)"};
}

Outcome stability(Context& ctx) {
  // Smooth-study configuration at N = M = 50 over [0, 4], extended to [0, 16] at the same step.
  RunConfig config = default_config(Experiment::smooth_convergence);
  const ManufacturedCase mc = manufactured_case(config);
  const Mesh mesh(mc.boundary, 50);
  const TransmissionProblem problem({Obstacle{mesh, mc.material}});
  const CQGrid grid = make_grid(16.0, 200, config.cq_eps);
  const BoundaryDataSeries data = boundary_data_series(mc.wave, mesh, mc.material.kappa, grid);
  SolveOptions opts;
  opts.threads = ctx.threads;
  const DensityHistory h = solve_history(problem, data.beta0, data.beta1, grid, {}, opts);
  const Eigen::VectorXd norms = stacked(h).rowwise().norm();
  const double early = norms.head(51).maxCoeff(), all = norms.maxCoeff();
  const double tail = norms.tail(50).maxCoeff();
  return {all <= 10.0 * early, "max density norm on [0,16] / on [0,4] = " + fix(all / early) +
                                   " (<= 10); last quarter / [0,4] = " + sci(tail / early)};
}

struct Criterion {
  std::string name;
  std::function<Outcome(Context&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tdbem acceptance suite"};
  bool strict = false;
  std::string report = "acceptance_report.txt";
  std::string only;
  Context ctx;
  app.add_flag("--strict", strict, "nonzero exit status when any criterion fails");
  app.add_option("--report", report, "report file");
  app.add_option("--only", only, "run criteria whose name contains this text");
  app.add_option("--threads", ctx.threads, "OpenMP threads (0: runtime default)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {"smooth-eu-rate", smooth_eu_rate},
      {"smooth-monotone", smooth_monotone},
      {"smooth-magnitude", smooth_magnitude},
      {"smooth-exterior-rate", smooth_exterior},
      {"polygon-rates", polygon_rates},
      {"circle-oracle", circle_oracle},
      {"cq-oracle", cq_oracle},
      {"structural-identities", structural},
      {"brute-force", brute_force},
      {"ecr-fixtures", ecr_fixtures},
      {"stability", stability},
  };

  std::ostringstream lines;
  int failed = 0, errors = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && c.name.find(only) == std::string::npos) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
      ++errors;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += o.pass ? 0 : 1;
    const std::string line =
        std::string(o.pass ? "PASS" : "FAIL") + " " + c.name + ": " + o.detail + " [" + fmt("%.1f", secs) + " s]";
    std::cout << line << std::endl;
    lines << line << "\n";
  }
  const std::string summary = std::to_string(failed) + " criteria failed";
  std::cout << summary << std::endl;
  std::ofstream f(report);
  f << lines.str() << summary << "\n";
  if (errors > 0) return 2;
  return strict && failed > 0 ? 1 : 0;
}

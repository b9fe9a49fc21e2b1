// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

// Experiment driver: convergence tables, the scatter demo and single runs.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tdbem/experiments.hpp"

namespace {

struct Overrides {
  std::optional<int> threads;
  std::optional<int> quad_order;
  std::optional<double> cq_eps;
  std::string out;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--threads", o.threads, "worker threads for the frequency loop (0: runtime default)");
  cmd->add_option("--quad-order", o.quad_order, "regular quadrature points per cell");
  cmd->add_option("--cq-eps", o.cq_eps, "target accuracy of the frequency contour");
  cmd->add_option("--out", o.out, "output directory")->required();
}

void apply(tdbem::RunConfig& c, const Overrides& o) {
  if (o.threads) c.threads = *o.threads;
  if (o.quad_order) c.quad_order = *o.quad_order;
  if (o.cq_eps) c.cq_eps = *o.cq_eps;
  c.out = o.out;
  c.validate();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-domain transmission BEM solver"};
  app.require_subcommand(1);

  Overrides conv_o, scatter_o, single_o;
  std::string geometry = "smooth";
  std::string levels;
  std::string conv_config, scatter_config, single_config;

  auto* conv = app.add_subcommand("convergence", "manufactured-solution convergence table");
  conv->add_option("--geometry", geometry, "smooth or polygon")->check(CLI::IsMember({"smooth", "polygon"}));
  conv->add_option("--levels", levels, "refinement list, e.g. 50,100 or 8:300,16:600");
  conv->add_option("--config", conv_config, "config file (command line options take precedence)")
      ->check(CLI::ExistingFile);
  add_overrides(conv, conv_o);

  auto* scatter = app.add_subcommand("scatter", "multiple circular scatterers, field frames");
  scatter->add_option("--config", scatter_config, "config file")->check(CLI::ExistingFile);
  add_overrides(scatter, scatter_o);

  auto* single = app.add_subcommand("single", "one manufactured-solution run with full histories");
  single->add_option("--config", single_config, "config file")->check(CLI::ExistingFile);
  add_overrides(single, single_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (conv->parsed()) {
      const auto exp = geometry == "polygon" ? tdbem::Experiment::polygon_convergence
                                             : tdbem::Experiment::smooth_convergence;
      tdbem::RunConfig c = conv_config.empty() ? tdbem::default_config(exp) : tdbem::load_config(conv_config);
      if (conv->count("--geometry") && c.experiment != exp) {
        throw tdbem::ConfigError("--geometry disagrees with the experiment in the config file");
      }
      if (!levels.empty()) c.levels = tdbem::parse_levels(levels, c.experiment);
      apply(c, conv_o);
      const auto rows = tdbem::run_convergence(c, &std::cerr);
      tdbem::write_table(std::cout, rows);
    } else if (scatter->parsed()) {
      tdbem::RunConfig c = scatter_config.empty() ? tdbem::default_config(tdbem::Experiment::scatter)
                                                  : tdbem::load_config(scatter_config);
      apply(c, scatter_o);
      const auto run = tdbem::run_scatter(c, &std::cerr);
      std::cout << run.frames.size() << " frames written to " << c.out.string() << "\n";
    } else if (single->parsed()) {
      tdbem::RunConfig c = single_config.empty() ? tdbem::default_config(tdbem::Experiment::single)
                                                 : tdbem::load_config(single_config);
      apply(c, single_o);
      const auto run = tdbem::run_single(c);
      std::cout << "E_phi,E_lambda,E_u\n"
                << run.final_errors.rel_phi << "," << run.final_errors.rel_lambda << ","
                << run.final_errors.rel_u << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

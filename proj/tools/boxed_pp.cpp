#include <iostream>

#include "CLI11.hpp"
#include "boxed_pp/cli.hpp"

int main(int argc, char** argv) {
  using boxed_pp::cli::RunConfig;
  RunConfig cfg;
  CLI::App app{"Sampling, verification and asymptotics of weighted lozenge tilings of a hexagon"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "Read options from a file of 'key = value' lines ('#' starts a comment)");

  app.add_option("--a", cfg.a, "Hexagon side a (number of paths)")->capture_default_str();
  app.add_option("--b", cfg.b, "Hexagon side b")->capture_default_str();
  app.add_option("--c", cfg.c, "Hexagon side c")->capture_default_str();
  app.add_option("--family", cfg.family, "Weight family")
      ->check(CLI::IsMember({"hahn", "racah", "qhahn", "qracah", "trig", "elliptic"}))
      ->capture_default_str();
  app.add_option("--q", cfg.q, "Base q (qhahn, qracah, elliptic)")->capture_default_str();
  app.add_option("--kappa-sq", cfg.kappa_sq, "kappa^2 (qracah)")->capture_default_str();
  app.add_option("--K", cfg.K, "Racah parameter K")->capture_default_str();
  app.add_option("--alpha", cfg.alpha, "Trigonometric angle alpha")->capture_default_str();
  app.add_option("--beta", cfg.beta, "Trigonometric angle beta")->capture_default_str();
  app.add_option("--p", cfg.p, "Elliptic nome p")->capture_default_str();
  app.add_option("--u1", cfg.u1, "Elliptic u1 as 're' or 're,im'")->capture_default_str();
  app.add_option("--u2", cfg.u2, "Elliptic u2 as 're' or 're,im'")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--samples", cfg.samples, "Number of samples")->capture_default_str();
  app.add_option("--threads", cfg.threads, "Worker threads for sampling (0: all cores)")->capture_default_str();
  app.add_option("--scale", cfg.scale, "Scale L: limit geometry has sides a/L, b/L, c/L and base q^L")
      ->capture_default_str();
  app.add_option("--grid", cfg.grid, "Grid resolution (boundary, density)")->capture_default_str();
  app.add_option("--in", cfg.in, "Input tiling file (render)");
  app.add_option("--out", cfg.out, "Output file (default: stdout)");
  app.add_option("--svg", cfg.svg, "SVG output file");

  app.add_subcommand("sample", "Draw exact samples; write tilings in line format and optionally an SVG");
  app.add_subcommand("render", "Render a tiling file as SVG");
  app.add_subcommand("verify", "Run the exact-enumeration verification battery");
  app.add_subcommand("boundary", "Trace the limit-shape frozen boundary (CSV, optional SVG)");
  app.add_subcommand("density", "Write local lozenge densities of the limit shape on a grid (CSV)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : boxed_pp::cli::BadInput;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  return boxed_pp::cli::dispatch(cfg, std::cout, std::cerr);
}

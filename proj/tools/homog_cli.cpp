#include "homog/harness.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  CLI::App app{"Perforated-domain homogenization toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<double> eps_override;
  std::optional<double> alpha_override, beta_override;
  std::optional<unsigned> seed_override;

  app.add_option("--config", config_path, "configuration file (key = value sections)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--eps", eps_override, "override the epsilon list")->delimiter(',');
  app.add_option("--alpha", alpha_override, "override the volume scaling exponent");
  app.add_option("--beta", beta_override, "override the surface scaling exponent");
  app.add_option("--seed", seed_override, "seed for randomized validation probes");

  auto* cell = app.add_subcommand("cell", "solve the periodic cell problems");
  auto* micro = app.add_subcommand("micro", "solve the microscopic problem");
  auto* macro = app.add_subcommand("macro", "solve the homogenized limit problem");
  auto* sweep = app.add_subcommand("sweep", "epsilon sweep with rate verdict");
  auto* compare = app.add_subcommand("compare", "micro/macro/reconstruction export");

  CLI11_PARSE(app, argc, argv);

  try {
    homog::RunConfig config =
        config_path.empty() ? homog::RunConfig{} : homog::load_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (!eps_override.empty()) config.eps = eps_override;
    if (alpha_override) config.alpha = *alpha_override;
    if (beta_override) config.beta = *beta_override;
    if (seed_override) config.seed = *seed_override;
    config.validate();

    if (cell->parsed()) {
      homog::cmd_cell(config, std::cout);
      return 0;
    }
    if (micro->parsed()) return homog::cmd_micro(config, std::cout);
    if (macro->parsed()) return homog::cmd_macro(config, std::cout);
    if (sweep->parsed()) return homog::cmd_sweep(config, std::cout);
    if (compare->parsed()) return homog::cmd_compare(config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

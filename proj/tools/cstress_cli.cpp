#include <iostream>

#include <CLI11.hpp>

#include "cstress/ritz.hpp"
#include "cstress/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Couple stress boundary-condition laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  double tol_scale = 1.0;
  CLI::App* run = app.add_subcommand("run", "Run the scenario described by a config file");
  run->add_option("config", config_path, "Scenario config")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out_dir, "Output directory (default: [output] dir)");
  run->add_option("--tol-scale", tol_scale, "Multiply every upper-bound tolerance")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    cstress::ScenarioConfig cfg = cstress::load_config(config_path);
    if (seed) cfg.seed = *seed;
    const std::string dir = out_dir.value_or(cfg.out_dir);
    const cstress::ScenarioResult result = cstress::run_scenario(cfg, tol_scale);
    cstress::write_outputs(result, cfg, dir);

    for (const auto& c : result.checks)
      std::cout << (c.pass ? "ok    " : "FAIL  ") << c.name << "  actual=" << c.actual
                << (c.lower_bound ? "  min=" : "  tol=") << c.tolerance << "\n";
    std::cout << (result.pass() ? "PASS" : "FAIL") << " " << cstress::to_string(cfg.scenario)
              << " -> " << dir << "\n";
    return result.pass() ? 0 : 1;
  } catch (const cstress::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cstress::SingularSystemError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

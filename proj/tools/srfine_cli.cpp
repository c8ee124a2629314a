// srfine: simulate | certify | verify-bounds
// Exit codes: 0 all checks pass, 1 a property failed or a row was flagged, 2 configuration error.

#include "srfine/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

int main(int argc, char** argv) {
  using namespace srfine;
  CLI::App app{"Super-resolution stability experiments: recovery sweeps, certificate checks, bound verification"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> oversample;
  std::optional<double> corrupt;
  bool trace = false, fitted = false;
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "base seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--trace", trace, "write per-solve objective history CSVs");
  app.add_flag("--fitted-constants", fitted, "check certificates with fitted constants");
  app.add_option("--oversample", oversample, "grid oversampling for certificate checks")->check(CLI::PositiveNumber);
  app.add_option("--corrupt-bound-scale", corrupt, "test hook: scale the block-norm bounds")->group("");

  auto* sim = app.add_subcommand("simulate", "generate, measure, corrupt, solve and score");
  auto* cert = app.add_subcommand("certify", "build and verify dual certificates");
  auto* bounds = app.add_subcommand("verify-bounds", "block-system norms, Fejer sums and Bernstein checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.out_dir = *out_dir;
    if (trace) cfg.trace = true;
    if (fitted) cfg.fitted_constants = true;
    if (oversample) cfg.oversample = *oversample;
    if (corrupt) cfg.bound_scale = *corrupt;

    if (sim->parsed()) {
      validate_config(cfg, Command::simulate);
      return cmd_simulate(cfg, std::cout);
    }
    if (cert->parsed()) {
      validate_config(cfg, Command::certify);
      return cmd_certify(cfg, std::cout);
    }
    if (bounds->parsed()) {
      validate_config(cfg, Command::verify_bounds);
      return cmd_verify_bounds(cfg, std::cout);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

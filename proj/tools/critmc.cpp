#include <CLI11.hpp>
#include <iostream>

#include "critmc/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"critmc - invariant-measure laboratory for critical stochastic recursions"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  int replicas_override = 0;
  bool force = false;
  bool have_seed = false, have_replicas = false;

  const std::vector<std::string> names = {"validate",       "simulate",
                                          "tail",           "constants",
                                          "poisson-check",  "kesten-baseline"};
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run configuration file")
        ->required();
    sub->add_option("--seed", seed_override, "override [run] seed")
        ->each([&](const std::string&) { have_seed = true; });
    sub->add_option("--replicas", replicas_override, "override [run] replicas")
        ->each([&](const std::string&) { have_replicas = true; });
    sub->add_option("--out", out_override, "override [output] dir");
    sub->add_flag("--force", force, "allow overwriting existing artifacts");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    critmc::RunConfig cfg = critmc::parse_config_file(config_path);
    if (have_seed) cfg.seed = seed_override;
    if (have_replicas) cfg.replicas = replicas_override;
    if (!out_override.empty()) cfg.out_dir = out_override;
    cfg.force = force;
    return critmc::run_subcommand(cmd, cfg, std::cout);
  } catch (const critmc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return critmc::kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return critmc::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return critmc::kExitRuntime;
  }
}

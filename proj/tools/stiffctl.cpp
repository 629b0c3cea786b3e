// Command-line driver for the experiment harness.
#include <CLI11.hpp>
#include <chrono>
#include <iostream>
#include <map>

#include "stiff/errors.hpp"
#include "stiff/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"stiff barrier experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> flags;
  std::string seed;

  for (const char* name : {"mosco", "continuity", "bc", "mc", "classify"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config_path, "JSON or key=value config file");
    sub->add_option("--out", flags["out"], "output directory");
    sub->add_option("--seed", seed, "master seed");
    for (const char* key : {"threads", "eps", "alpha", "beta", "ctan", "cnorm", "t", "dt", "grid", "sweep",
                            "target", "mu", "levels", "phases", "checks", "n_paths"})
      sub->add_option(std::string("--") + key, flags[key]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  stiff::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = stiff::load_config(config_path);
    cfg.kind = stiff::parse_experiment(app.get_subcommands().front()->get_name());
    if (!seed.empty()) stiff::apply_setting(cfg, "seed", seed);
    for (const auto& [key, value] : flags)
      if (!value.empty()) stiff::apply_setting(cfg, key, value);
    if (cfg.kind != stiff::ExperimentKind::classify) cfg.validate();
  } catch (const stiff::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    const stiff::ExperimentResult r = stiff::run_experiment(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!cfg.out_dir.empty()) stiff::write_outputs(r, cfg.out_dir, wall);
    std::cout << r.report.dump(2) << "\n";
    return r.pass ? 0 : 1;
  } catch (const stiff::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

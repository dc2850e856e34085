#include <iostream>

#include <CLI11.hpp>

#include "slelab_cli/run.hpp"

int main(int argc, char** argv) {
  using namespace slelab::cli;

  CLI::App app{"sle-lab: chordal and strip SLE(kappa; rho) simulation lab"};
  app.require_subcommand(1);

  std::string config_file;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out_dir;
  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a YAML config");
  run_cmd->add_option("config", config_file, "Config file")->required()->check(CLI::ExistingFile);
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Master seed (overrides the config and SLE_LAB_SEED)");
  run_cmd->add_option("--threads", threads, "Worker threads; results do not depend on it")
      ->check(CLI::Range(1u, 1024u));
  auto* out_opt = run_cmd->add_option("--out", out_dir, "Output directory (overrides output_dir)");

  std::string name;
  auto* describe_cmd = app.add_subcommand("describe", "Describe an experiment and its parameters");
  describe_cmd->add_option("experiment", name, "Experiment name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfigError;
  }

  if (*run_cmd) {
    CommandOptions options;
    if (*seed_opt) options.seed = seed;
    if (*out_opt) options.out = out_dir;
    options.threads = threads;
    return run_command(config_file, options, std::cout, std::cerr);
  }
  try {
    std::cout << describe(name);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfigError;
  }
}

// dwnls: command-line driver for the double-well NLS laboratory.
//
//   dwnls <spectrum|agmon|evolve|twomode|compare|sweep> --config run.ini [--out DIR] [--seed N]

#include <CLI11.hpp>

#include "dwnls/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Double-well nonlinear Schroedinger laboratory"};
  app.require_subcommand(1);

  dwnls::cli::Options opts;
  std::uint64_t seed = 0;
  app.add_option("--config", opts.config, "INI run configuration")->required();
  app.add_option("--out", opts.out, "output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "overrides solver.seed");

  const std::pair<const char*, const char*> commands[] = {
      {"spectrum", "lowest eigenpairs, Omega, omega"},
      {"agmon", "Agmon distance between the wells"},
      {"evolve", "full NLS run with diagnostics"},
      {"twomode", "reduced two-mode run and self-trapping scan"},
      {"compare", "NLS against the two-mode model on matched data"},
      {"sweep", "hbar sweep (splitting law) or epsilon sweep"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dwnls::cli::kConfigError;
  }
  if (*seed_opt) opts.seed = seed;
  return dwnls::cli::run(app.get_subcommands().front()->get_name(), opts);
}

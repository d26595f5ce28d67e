#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace dwnls::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kSolverError = 3,
  kBlowUp = 4,
  kPartialSweep = 5,
};

struct Options {
  std::filesystem::path config;
  std::filesystem::path out = "out";
  std::optional<std::uint64_t> seed;  // overrides solver.seed
};

int cmd_spectrum(const Options& o);
int cmd_agmon(const Options& o);
int cmd_evolve(const Options& o);
int cmd_twomode(const Options& o);
int cmd_compare(const Options& o);
int cmd_sweep(const Options& o);

/// Dispatches by subcommand name; unknown names return kConfigError.
int run(const std::string& command, const Options& o);

}  // namespace dwnls::cli

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcap/io.hpp"

namespace qcap::cli {

/// Environment variable naming the default config file.
inline constexpr const char* kConfigEnv = "QCAP_CONFIG";

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNotConverged = 3;

struct RunConfig {
  std::string command;
  std::optional<std::string> channel;
  std::optional<std::string> ensemble;
  std::optional<std::string> hamiltonian;
  std::optional<std::string> state;
  std::optional<std::string> gaussian;
  std::optional<std::string> degrading;
  std::optional<std::string> config;  // falls back to $QCAP_CONFIG
  std::optional<double> energy;
  std::string unit = "nats";
  std::uint64_t seed = 0;
  std::optional<std::string> out;
  std::string format = "json";
  std::optional<int> restarts;
  std::vector<std::string> tol;  // key=val overrides, applied after the config file
  std::vector<int> dims;         // d_B, d_E for sweep-truncation
  std::vector<int> ranks;
  std::vector<int> ranks_b;
  std::vector<int> ranks_e;
  bool degradable = false;
  bool parallel = false;
};

struct Outcome {
  int exit_code = kExitOk;
  io::json report;
  std::string rendered;  // report in the requested format
};

/// Runs one subcommand. Validation problems propagate as exceptions.
Outcome execute(const RunConfig& config);

/// execute() plus output and error mapping; returns the exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv into a RunConfig and runs it.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qcap::cli

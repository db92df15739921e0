#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "advper/attacks.hpp"
#include "advper/measures.hpp"
#include "advper/solver.hpp"

namespace advper {

struct RegionBox {
  std::vector<double> lo, hi;
};

struct ExperimentConfig {
  std::string mode;  // informational; the subcommand decides what runs
  std::optional<RegionBox> region;
  double delta = 0.05;
  std::size_t trials = 200;
  std::uint64_t seed = 0;
  bool timing = false;
};

struct RunConfig {
  GridSpec grid;
  std::string preset;
  DensityParams params;
  std::optional<std::string> csv_path;
  double csv_w0 = 0.5, csv_w1 = 0.5;
  AttackKind kind = AttackKind::Eps;
  std::vector<double> eps_list;
  double p = 0.0;
  std::string kernel = "UNIFORM";
  SolverConfig solver;
  ExperimentConfig experiment;
  std::uint64_t hash = 0;  // FNV-1a of the raw config bytes
};

std::uint64_t fnv1a(const std::string& bytes);

// Schema errors raise Error(ErrorCode::Schema); unknown keys are rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace advper

#pragma once

#include <cstdint>
#include <random>

#include "advper/grid.hpp"

namespace advper {

// Independent stream per (seed, index) so parallel trials are schedule-independent.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index);

double uniform01(std::mt19937_64& rng);
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);

struct RandomSetOptions {
  int min_balls = 1;
  int max_balls = 4;
  double min_radius = 0.05;  // fraction of the smallest window extent
  double max_radius = 0.35;
  double halfspace_prob = 0.5;
  double noise = 0.01;
};

// Union of random norm balls, optionally cut or extended by a random
// half-space, plus independent per-cell noise.
CellSet random_set(const GridPtr& grid, std::mt19937_64& rng, const RandomSetOptions& opt = {});

// Random set restricted to `region` (cells outside are never set).
CellSet random_subset(const CellSet& region, std::mt19937_64& rng, const RandomSetOptions& opt = {});

}  // namespace advper

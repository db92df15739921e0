#include "advper/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace advper {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

// Explicit conversions keep streams identical across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

CellSet random_set(const GridPtr& grid, std::mt19937_64& rng, const RandomSetOptions& opt) {
  const Grid& g = *grid;
  const int d = g.dim();
  double extent = std::numeric_limits<double>::infinity();
  for (int k = 0; k < d; ++k) extent = std::min(extent, g.spec().hi[k] - g.spec().lo[k]);

  auto random_point = [&] {
    std::vector<double> p(d);
    for (int k = 0; k < d; ++k) p[k] = g.spec().lo[k] + uniform01(rng) * (g.spec().hi[k] - g.spec().lo[k]);
    return p;
  };

  CellSet s(grid);
  const int nballs = opt.min_balls + static_cast<int>(uniform_index(rng, opt.max_balls - opt.min_balls + 1));
  for (int b = 0; b < nballs; ++b) {
    const auto c = random_point();
    const double r = extent * (opt.min_radius + uniform01(rng) * (opt.max_radius - opt.min_radius));
    s |= ball(grid, c, r);
  }

  if (uniform01(rng) < opt.halfspace_prob) {
    std::vector<double> normal(d);
    for (int k = 0; k < d; ++k) normal[k] = uniform01(rng) * 2.0 - 1.0;
    const auto anchor = random_point();
    const bool cut = uniform01(rng) < 0.5;
    CellSet half(grid);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double dot = 0.0;
      for (int k = 0; k < d; ++k) dot += normal[k] * (g.center(i, k) - anchor[k]);
      if (dot > 0.0) half.set(i);
    }
    if (cut)
      s &= half;
    else
      s |= half;
  }

  for (std::size_t i = 0; i < g.size(); ++i)
    if (uniform01(rng) < opt.noise) s.flip(i);
  return s;
}

CellSet random_subset(const CellSet& region, std::mt19937_64& rng, const RandomSetOptions& opt) {
  CellSet s = random_set(region.grid_ptr(), rng, opt);
  s &= region;
  s.set_outside(false);
  return s;
}

}  // namespace advper

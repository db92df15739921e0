#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "advper/attacks.hpp"
#include "advper/grid.hpp"
#include "advper/measures.hpp"
#include "advper/sampling.hpp"

namespace advper::testing {

inline GridPtr grid1d(double lo, double hi, double h, Norm norm = Norm::L2) {
  GridSpec s;
  s.dim = 1;
  s.lo = {lo};
  s.hi = {hi};
  s.h = h;
  s.norm = norm;
  return make_grid(s);
}

inline GridPtr grid2d(double lo, double hi, double h, Norm norm = Norm::L2) {
  GridSpec s;
  s.dim = 2;
  s.lo = {lo, lo};
  s.hi = {hi, hi};
  s.h = h;
  s.norm = norm;
  return make_grid(s);
}

// 401 cells on [-2.50625, 2.50625]; linear1d support [-2, 2] keeps a 0.5 margin.
inline GridPtr linear_grid() { return grid1d(-2.50625, 2.50625, 0.0125); }

inline DensityPair linear_density(const GridPtr& g) { return build_density(g, "linear1d", {{"margin", 0.5}}); }

// 101 x 101 cells.
inline GridPtr gauss2d_grid() { return grid2d(-3.03, 3.03, 0.06); }

inline DensityPair gauss2d_density(const GridPtr& g) {
  return build_density(g, "gauss2d",
                       {{"w0", 0.4}, {"w1", 0.6}, {"mu0x", -1.0}, {"mu0y", 0.0}, {"mu1x", 1.0}, {"mu1y", 0.0},
                        {"sigma", 0.5}, {"trunc", 3.5}, {"margin", 0.25}});
}

// Cells whose center lies in [a, b] (1D).
inline CellSet interval(const GridPtr& g, double a, double b) {
  CellSet s(g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->center(i, 0);
    const double tol = 1e-9 * g->h();
    if (x >= a - tol && x <= b + tol) s.set(i);
  }
  return s;
}

// Lattice offset between two cells, in cells.
inline std::vector<std::ptrdiff_t> offset(const Grid& g, std::size_t x, std::size_t y) {
  std::ptrdiff_t ux[kMaxDim], uy[kMaxDim];
  g.unravel(x, ux);
  g.unravel(y, uy);
  std::vector<std::ptrdiff_t> o(g.dim());
  for (int k = 0; k < g.dim(); ++k) o[k] = ux[k] - uy[k];
  return o;
}

// Norm of an integer offset scaled by h, written out per norm.
inline double lattice_length(const Grid& g, const std::vector<std::ptrdiff_t>& o) {
  std::int64_t u = 0;
  for (auto v : o) {
    const std::int64_t a = std::llabs(v);
    if (g.norm() == Norm::L1) u += a;
    if (g.norm() == Norm::L2) u += a * a;
    if (g.norm() == Norm::LInf) u = std::max(u, a);
  }
  return g.norm() == Norm::L2 ? g.h() * std::sqrt(static_cast<double>(u)) : g.h() * static_cast<double>(u);
}

inline double pair_distance(const Grid& g, std::size_t x, std::size_t y) { return lattice_length(g, offset(g, x, y)); }

// Distance from a cell to the nearest lattice cell outside the window: the
// closest one sits straight across the nearest window edge.
inline double exterior_oracle(const Grid& g, std::size_t x) {
  std::ptrdiff_t u[kMaxDim];
  g.unravel(x, u);
  std::ptrdiff_t best = std::numeric_limits<std::ptrdiff_t>::max();
  for (int k = 0; k < g.dim(); ++k) {
    best = std::min(best, u[k] + 1);
    best = std::min(best, static_cast<std::ptrdiff_t>(g.extent(k)) - u[k]);
  }
  std::vector<std::ptrdiff_t> o(g.dim(), 0);
  o[0] = best;
  return lattice_length(g, o);
}

// Brute-force d(x, S) over every pair, exterior included when S.outside().
inline double distance_oracle(const CellSet& s, std::size_t x) {
  const Grid& g = s.grid();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < g.size(); ++y)
    if (s.test(y)) best = std::min(best, pair_distance(g, x, y));
  if (s.outside()) best = std::min(best, exterior_oracle(g, x));
  return best;
}

inline bool in_set(const CellSet& s, std::size_t x) { return s.test(x); }

inline bool same_bits(const CellSet& a, const CellSet& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.test(i) != b.test(i)) return false;
  return true;
}

// Sum of w_i rho_i h^d over the window cells of s, in plain doubles.
inline double weighted_mass(const CellSet& s, int cls, const DensityPair& dp) {
  const double vol = dp.g().cell_volume();
  const double w = cls == 0 ? dp.w0 : dp.w1;
  const auto& rho = cls == 0 ? dp.rho0 : dp.rho1;
  double m = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.test(i)) m += w * rho[i] * vol;
  return m;
}

// J_phi from the definition, one cell at a time through attacked_at.
inline double risk_oracle(const Attack& phi, const CellSet& a, const DensityPair& dp) {
  const double vol = dp.g().cell_volume();
  double j = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) {
    const bool in_a = a.test(x);
    const bool att = phi.attacked_at(x, a);
    if (in_a || att) j += dp.w0 * dp.rho0[x] * vol;
    if (!in_a || att) j += dp.w1 * dp.rho1[x] * vol;
  }
  return j;
}

// Attack that only ever fires on the A side: breaks the complement property.
class OneSidedAttack final : public Attack {
 public:
  explicit OneSidedAttack(const GridPtr& g, double eps) : Attack(g, eps), inner_(g, eps) {}
  AttackKind kind() const override { return AttackKind::Custom; }
  std::string name() const override { return "one-sided"; }
  bool attacked_at(std::size_t x, const CellSet& a) const override { return a.test(x) && inner_.attacked_at(x, a); }

 private:
  EpsAttack inner_;
};

// Band attack that additionally reads one cell just beyond its reach.
class PeekingAttack final : public Attack {
 public:
  explicit PeekingAttack(const GridPtr& g, double eps) : Attack(g, eps), inner_(g, eps) {
    shift_ = static_cast<std::size_t>(std::ceil(eps / g->h())) + 1;
  }
  AttackKind kind() const override { return AttackKind::Custom; }
  std::string name() const override { return "peeking"; }
  bool attacked_at(std::size_t x, const CellSet& a) const override {
    if (inner_.attacked_at(x, a)) return true;
    const std::size_t far = x + shift_;
    return far < a.size() && a.test(far) != a.test(x);
  }

 private:
  EpsAttack inner_;
  std::size_t shift_ = 0;
};

inline std::vector<CellSet> random_sets(const GridPtr& g, std::uint64_t seed, std::size_t n,
                                        const RandomSetOptions& opt = {}) {
  std::vector<CellSet> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = make_stream(seed, i);
    out.push_back(random_set(g, rng, opt));
  }
  return out;
}

}  // namespace advper::testing

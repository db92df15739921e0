#pragma once

#include <map>
#include <string>
#include <vector>

#include "advper/grid.hpp"

namespace advper {

// Fixed-point mass with 2^-100 resolution. Per-cell masses are rounded once
// when a density is built, so every sum over a set is an exact integer sum
// and set-additive identities hold bit-for-bit.
class Mass {
 public:
  static constexpr int kFracBits = 100;

  constexpr Mass() = default;
  static Mass from_double(double v);
  double to_double() const;
  __int128 raw() const { return v_; }

  Mass& operator+=(Mass o) {
    v_ += o.v_;
    return *this;
  }
  Mass& operator-=(Mass o) {
    v_ -= o.v_;
    return *this;
  }
  friend Mass operator+(Mass a, Mass b) { return a += b; }
  friend Mass operator-(Mass a, Mass b) { return a -= b; }
  friend bool operator==(Mass a, Mass b) { return a.v_ == b.v_; }
  friend bool operator<(Mass a, Mass b) { return a.v_ < b.v_; }
  friend bool operator<=(Mass a, Mass b) { return a.v_ <= b.v_; }

 private:
  __int128 v_ = 0;
};

using DensityParams = std::map<std::string, double>;

struct DensityPair {
  GridPtr grid;
  double w0 = 0.5;
  double w1 = 0.5;
  std::vector<double> rho0;
  std::vector<double> rho1;
  double M = 0.0;
  std::string preset;

  // Per-cell fixed-point masses: rho_i h^d and w_i rho_i h^d.
  std::vector<Mass> cell0, cell1, weighted0, weighted1;

  const Grid& g() const { return *grid; }
};

std::vector<std::string> density_presets();

// Densities are sampled at cell centers, renormalized to unit grid mass and
// checked against the declared support margin (param "margin", default 0).
DensityPair build_density(const GridPtr& grid, const std::string& preset, const DensityParams& params);

// CSV with header "rho0,rho1" and one row per cell in linear index order.
DensityPair load_density_csv(const GridPtr& grid, const std::string& path, double w0, double w1);

// Assembles a DensityPair from raw per-cell values (renormalizes, fills mass tables).
DensityPair make_density(const GridPtr& grid, double w0, double w1, std::vector<double> rho0,
                         std::vector<double> rho1, std::string name);

std::vector<double> signed_margin(const DensityPair& dp);

Mass measure_exact(const CellSet& s, int cls, const DensityPair& dp);
Mass weighted_exact(const CellSet& s, int cls, const DensityPair& dp);
double measure(const CellSet& s, int cls, const DensityPair& dp);

// Exterior mass is zero by the support convention, so only window cells count.
Mass bayes_risk_exact(const CellSet& a, const DensityPair& dp);
double bayes_risk(const CellSet& a, const DensityPair& dp);

// Cells where either class density is positive. Bayes sets are taken inside it.
CellSet support_set(const DensityPair& dp);
CellSet bayes_max(const DensityPair& dp);
CellSet bayes_min(const DensityPair& dp);
CellSet margin_region(const DensityPair& dp, double delta);

struct NondegeneracyReport {
  bool passed = false;
  bool vacuous = false;
  double min_gradient = 0.0;
  std::size_t cells_checked = 0;
  double bayes_gap = 0.0;  // hausdorff_distance(bayes_max, bayes_min)
};

NondegeneracyReport nondegeneracy_check(const DensityPair& dp, double alpha);

}  // namespace advper

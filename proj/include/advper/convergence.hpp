#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advper/solver.hpp"

namespace advper {

struct CorralReport {
  bool passed = false;   // at the requested eta
  bool lower_ok = false;  // erode(bayes_min, eta) n K inside A n K
  bool upper_ok = false;  // A n K inside dilate(bayes_max, eta) n K
  double eta_min = 0.0;   // smallest passing eta (+inf if none)
};

CorralReport corral_check(const CellSet& a, const DensityPair& dp, double eta, const CellSet& k);

struct ConvergenceRecord {
  double eps = 0.0;
  double hausdorff = 0.0;  // d_H(A_eps n K, bayes_max n K)
  double eta_corral = 0.0;
  double j_value = 0.0;
  double bayes_value = 0.0;
  Certificate certificate = Certificate::LocalOpt;
  double wall_ms = 0.0;
  bool degenerate = false;     // bayes_max != bayes_min
  double hausdorff_max = 0.0;  // d_H((A u A0max) n K, A0max n K)
  double hausdorff_min = 0.0;  // d_H((A n A0min) n K, A0min n K)
  double boundary = 0.0;
  CellSet argmin;
};

struct ConvergenceConfig {
  std::vector<double> eps_list;  // strictly decreasing
  AttackKind kind = AttackKind::Eps;
  double p = 0.0;
  SolverConfig solver;
  std::optional<CellSet> region;  // K; default: window eroded by 2 eps_max + 2h. Always cut to supp(mu).
  int threads = 1;
  bool timing = false;  // wall_ms stays 0 unless set, keeping outputs reproducible
};

CellSet default_region(const GridPtr& grid, double eps_max);

std::vector<ConvergenceRecord> run_convergence_experiment(const DensityPair& dp, const ConvergenceConfig& cfg);

struct RateFit {
  double exponent = 0.0;
  double constant = 0.0;  // log-space intercept
  double r2 = 0.0;
  std::size_t used = 0;
};

// Least squares of log d_H on log eps over records with d_H > 2h.
RateFit fit_rate(std::span<const ConvergenceRecord> records, double h);

}  // namespace advper

#pragma once

#include <optional>

#include "advper/attacks.hpp"
#include "advper/measures.hpp"

namespace advper {

struct PerimeterValue {
  double scaled = 0.0;      // eps * Per_eps
  double normalized = 0.0;  // Per_eps
  Mass exact;               // scaled, in fixed point
};

// Relative versions restrict both bands to e.
PerimeterValue eps_perimeter(const CellSet& a, double eps, const DensityPair& dp);
PerimeterValue eps_perimeter_rel(const CellSet& a, double eps, const DensityPair& dp, const CellSet& e);

// Not divided by eps.
double prob_perimeter(const CellSet& a, double eps, double p, const Kernel& kernel, const DensityPair& dp);
double prob_perimeter_rel(const CellSet& a, double eps, double p, const Kernel& kernel, const DensityPair& dp,
                          const CellSet& e);

Mass deficit_exact(const LambdaSets& l, const DensityPair& dp);
Mass deficit_rel_exact(const LambdaSets& l, const DensityPair& dp, const CellSet& e);
double adversarial_deficit(const Attack& phi, const CellSet& a, const DensityPair& dp);
double adversarial_deficit_rel(const Attack& phi, const CellSet& a, const DensityPair& dp, const CellSet& e);

struct RiskReport {
  double bayes = 0.0;
  double deficit = 0.0;
  double total = 0.0;   // bayes + deficit
  double class0 = 0.0;  // w0 rho0(Lam0 u A)
  double class1 = 0.0;  // w1 rho1(Lam1 u A^c)
  Mass total_exact;
};

// Union form cross-checked against bayes + deficit; mismatch is an internal error.
RiskReport risk_total(const Attack& phi, const CellSet& a, const DensityPair& dp);
RiskReport risk_from_lambda(const CellSet& a, const LambdaSets& l, const DensityPair& dp);

// J_eps as w0 rho0(A^eps) + w1 rho1((A^-eps)^c), checked against risk_total(phi_eps).
double risk_atp_supform(const CellSet& a, double eps, const DensityPair& dp);
Mass risk_atp_supform_exact(const CellSet& a, double eps, const DensityPair& dp);

struct BallPerimeterReport {
  double alpha = 0.0;
  double bound = 0.0;  // alpha R^{d-1} eps
  double slack = 0.0;  // 2 M omega_d d (2R)^{d-1} h
  double ball_scaled = 0.0;
  double complement_scaled = 0.0;
  bool passed = false;
};

BallPerimeterReport ball_perimeter_bound_check(const DensityPair& dp, double r, double eps,
                                               std::span<const double> center);

struct DominationReport {
  double deficit = 0.0;
  double eps_per = 0.0;  // eps * Per_eps
  double deficit_rel = 0.0;
  double eps_per_rel = 0.0;
  bool domination_ok = false;
  bool domination_rel_ok = false;
  ViolationReport isolation;
  bool lattice_tie = false;  // some offset has length exactly eps
  double collar = 0.0;       // extra radius used for the isolation region
  bool ok() const { return domination_ok && domination_rel_ok && isolation.ok(); }
};

DominationReport deficit_domination_check(const Attack& phi, const CellSet& a, const CellSet& e,
                                          const DensityPair& dp);

}  // namespace advper

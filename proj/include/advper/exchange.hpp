#pragma once

#include <array>
#include <string>
#include <vector>

#include "advper/risks.hpp"

namespace advper {

// u[i - 1] holds U_i. hat/tilde split every U_i by phi(x; A \ E) = 1 / 0;
// only i in {1, 3, 6, 9, 10, 11} are refined in the theory, the others are
// kept so that their forced attack status can be checked.
struct USetDecomposition {
  std::array<CellSet, 13> u;
  std::array<CellSet, 13> hat;
  std::array<CellSet, 13> tilde;

  static constexpr std::array<int, 6> kRefined = {1, 3, 6, 9, 10, 11};

  const CellSet& U(int i) const { return u[i - 1]; }
  const CellSet& Hat(int i) const { return hat[i - 1]; }
  const CellSet& Tilde(int i) const { return tilde[i - 1]; }
};

USetDecomposition u_decomposition(const Attack& phi, const CellSet& a, const CellSet& e);

// Per-cell classification straight from the definitions, through attacked_at.
USetDecomposition u_decomposition_literal(const Attack& phi, const CellSet& a, const CellSet& e);

struct IdentityResult {
  std::string name;
  bool holds = false;
};

struct IdentityReport {
  std::vector<IdentityResult> identities;
  double deficit_ae_direct = 0.0;    // D(A; E)
  double deficit_ae_recomposed = 0.0;
  double deficit_eca_direct = 0.0;   // D(E^c; A)
  double deficit_eca_recomposed = 0.0;
  bool ok() const;
  std::vector<std::string> failures() const;
};

IdentityReport verify_appendix_identities(const USetDecomposition& dec, const Attack& phi, const CellSet& a,
                                          const CellSet& e, const DensityPair& dp);

struct EmptinessReport {
  std::size_t hat1 = 0, tilde3 = 0, tilde10 = 0;  // cell counts, all must be 0
  bool ok() const { return hat1 == 0 && tilde3 == 0 && tilde10 == 0; }
};

EmptinessReport phi_eps_emptiness_check(const CellSet& a, const CellSet& e, double eps);
EmptinessReport emptiness_of(const USetDecomposition& dec);

struct EnergyDifference {
  double lhs = 0.0;  // J(A \ E) - J(A)
  double rhs = 0.0;  // from the U-sets
  Mass lhs_exact, rhs_exact;
};

EnergyDifference exact_energy_difference(const Attack& phi, const CellSet& a, const CellSet& e,
                                         const DensityPair& dp);
EnergyDifference energy_difference_from(const USetDecomposition& dec, const RiskReport& ja, const RiskReport& jd,
                                        const DensityPair& dp);

struct ExchangeReport {
  bool hypothesis_met = false;  // J(A \ E) >= J(A)
  double energy_diff = 0.0;
  double lhs = 0.0;  // D(A; E)
  double rhs = 0.0;  // D(E^c; A) - delta |A n E| + w0 rho0(hat U11) + w1 rho1(hat U1)
  double overlap_volume = 0.0;
  double correction0 = 0.0;  // w0 rho0(hat U11)
  double correction1 = 0.0;  // w1 rho1(hat U1)
  bool violated = false;
  // phi_eps only: the form without the hat U1 term, with hat U11 also
  // evaluated as {x in A^c n E : d(x, A \ E) < eps}.
  bool eps_form_checked = false;
  bool eps_form_violated = false;
  bool eps_hat11_matches = true;
};

ExchangeReport energy_exchange_check(const Attack& phi, const CellSet& a, const CellSet& e, const DensityPair& dp,
                                     double delta);

}  // namespace advper

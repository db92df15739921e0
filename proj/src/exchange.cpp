#include "advper/exchange.hpp"

#include <cmath>

namespace advper {

namespace {

// Lambda type of a cell: tilde0, lam0, lam1, tilde1.
enum Type { T0 = 0, L0 = 1, L1 = 2, T1 = 3 };

// U index (1-based) by [type under A][type under E]; U13 ignores E.
constexpr int kTable[4][4] = {
    /* A in T0 */ {13, 13, 13, 13},
    /* A in L0 */ {10, 9, 11, 12},
    /* A in L1 */ {8, 7, 6, 5},
    /* A in T1 */ {1, 2, 3, 4},
};

Type type_of(bool inside, bool attacked) {
  if (inside) return attacked ? L1 : T1;
  return attacked ? L0 : T0;
}

CellSet in_window(const CellSet& s) {
  CellSet r = s;
  r.set_outside(false);
  return r;
}

CellSet unite(const USetDecomposition& d, std::initializer_list<int> plain, std::initializer_list<int> hats,
              std::initializer_list<int> tildes, const GridPtr& grid) {
  CellSet s(grid);
  for (int i : plain) s |= d.U(i);
  for (int i : hats) s |= d.Hat(i);
  for (int i : tildes) s |= d.Tilde(i);
  return s;
}

}  // namespace

USetDecomposition u_decomposition(const Attack& phi, const CellSet& a, const CellSet& e) {
  const LambdaSets la = lambda_sets(phi, a);
  const LambdaSets le = lambda_sets(phi, e);
  const CellSet att_d = phi.attacked(a - e);
  const std::array<const CellSet*, 4> ta = {&la.tilde0, &la.lam0, &la.lam1, &la.tilde1};
  const std::array<const CellSet*, 4> te = {&le.tilde0, &le.lam0, &le.lam1, &le.tilde1};
  USetDecomposition d;
  for (auto& s : d.u) s = CellSet(phi.grid_ptr());
  for (int x = 0; x < 4; ++x) {
    if (x == T0) {
      d.u[12] = *ta[T0];
      continue;
    }
    for (int y = 0; y < 4; ++y) d.u[kTable[x][y] - 1] = *ta[x] & *te[y];
  }
  for (int i = 0; i < 13; ++i) {
    d.hat[i] = d.u[i] & att_d;
    d.tilde[i] = d.u[i] - att_d;
  }
  return d;
}

USetDecomposition u_decomposition_literal(const Attack& phi, const CellSet& a, const CellSet& e) {
  const CellSet diff = a - e;
  USetDecomposition d;
  for (int i = 0; i < 13; ++i) d.u[i] = d.hat[i] = d.tilde[i] = CellSet(phi.grid_ptr());
  for (std::size_t x = 0; x < a.size(); ++x) {
    const Type tA = type_of(a.test(x), phi.attacked_at(x, a));
    const Type tE = type_of(e.test(x), phi.attacked_at(x, e));
    const int i = kTable[tA][tE] - 1;
    d.u[i].set(x);
    if (phi.attacked_at(x, diff))
      d.hat[i].set(x);
    else
      d.tilde[i].set(x);
  }
  return d;
}

bool IdentityReport::ok() const {
  for (const auto& r : identities)
    if (!r.holds) return false;
  return true;
}

std::vector<std::string> IdentityReport::failures() const {
  std::vector<std::string> out;
  for (const auto& r : identities)
    if (!r.holds) out.push_back(r.name);
  return out;
}

IdentityReport verify_appendix_identities(const USetDecomposition& d, const Attack& phi, const CellSet& a,
                                          const CellSet& e, const DensityPair& dp) {
  const GridPtr& g = phi.grid_ptr();
  IdentityReport rep;
  auto add = [&](std::string name, bool holds) { rep.identities.push_back({std::move(name), holds}); };

  std::size_t total = 0;
  CellSet all(g);
  bool disjoint = true;
  for (const auto& s : d.u) {
    total += s.count();
    disjoint = disjoint && !all.intersects(s);
    all |= s;
  }
  add("partition", disjoint && total == g->size() && all == CellSet::full(g));

  bool refined = true;
  for (int i = 0; i < 13; ++i)
    refined = refined && (d.hat[i] | d.tilde[i]) == d.u[i] && !d.hat[i].intersects(d.tilde[i]);
  add("hat/tilde split", refined);

  const CellSet a_in = in_window(a), e_in = in_window(e);
  const CellSet diff = a - e;
  add("A n E", (a_in & e_in) == unite(d, {3, 4, 5, 6}, {}, {}, g));
  add("A \\ E", in_window(diff) == unite(d, {1, 2, 7, 8}, {}, {}, g));
  add("(A \\ E)^c", diff.window_complement() == unite(d, {3, 4, 5, 6, 9, 10, 11, 12, 13}, {}, {}, g));

  const LambdaSets ld = lambda_sets(phi, diff);
  add("Lam0(A \\ E)", ld.lam0 == unite(d, {}, {3, 6, 9, 10, 11}, {}, g));
  add("Lam1(A \\ E)", ld.lam1 == unite(d, {2, 7, 8}, {1}, {}, g));
  add("tLam0(A \\ E)", ld.tilde0 == unite(d, {4, 5, 12, 13}, {}, {3, 6, 9, 10, 11}, g));
  add("tLam1(A \\ E)", ld.tilde1 == d.Tilde(1));

  const LambdaSets la = lambda_sets(phi, a);
  const LambdaSets lec = lambda_sets(phi, e.complement());
  const Mass dae = deficit_rel_exact(la, dp, e_in);
  const Mass dae_u = weighted_exact(d.U(11) | d.U(12), 0, dp) + weighted_exact(d.U(5) | d.U(6), 1, dp);
  const Mass deca = deficit_rel_exact(lec, dp, a_in);
  const Mass deca_u = weighted_exact(d.U(3) | d.U(6), 0, dp) + weighted_exact(d.U(2) | d.U(7), 1, dp);
  rep.deficit_ae_direct = dae.to_double();
  rep.deficit_ae_recomposed = dae_u.to_double();
  rep.deficit_eca_direct = deca.to_double();
  rep.deficit_eca_recomposed = deca_u.to_double();
  add("D(A;E) recomposition", std::abs(rep.deficit_ae_direct - rep.deficit_ae_recomposed) <= 1e-12);
  add("D(E^c;A) recomposition", std::abs(rep.deficit_eca_direct - rep.deficit_eca_recomposed) <= 1e-12);
  return rep;
}

EmptinessReport emptiness_of(const USetDecomposition& d) {
  EmptinessReport r;
  r.hat1 = d.Hat(1).count();
  r.tilde3 = d.Tilde(3).count();
  r.tilde10 = d.Tilde(10).count();
  return r;
}

EmptinessReport phi_eps_emptiness_check(const CellSet& a, const CellSet& e, double eps) {
  const EpsAttack phi(a.grid_ptr(), eps);
  return emptiness_of(u_decomposition(phi, a, e));
}

EnergyDifference energy_difference_from(const USetDecomposition& d, const RiskReport& ja, const RiskReport& jd,
                                        const DensityPair& dp) {
  const GridPtr& g = dp.grid;
  EnergyDifference r;
  r.lhs_exact = jd.total_exact - ja.total_exact;
  const CellSet gain = unite(d, {2}, {1, 3}, {}, g);
  const CellSet swap = unite(d, {4}, {}, {3}, g);
  const CellSet loss = unite(d, {5, 12}, {}, {6, 9, 10, 11}, g);
  r.rhs_exact = weighted_exact(gain, 1, dp) - (weighted_exact(swap, 0, dp) - weighted_exact(swap, 1, dp)) -
                weighted_exact(loss, 0, dp);
  r.lhs = r.lhs_exact.to_double();
  r.rhs = r.rhs_exact.to_double();
  return r;
}

EnergyDifference exact_energy_difference(const Attack& phi, const CellSet& a, const CellSet& e,
                                         const DensityPair& dp) {
  const RiskReport ja = risk_total(phi, a, dp);
  const RiskReport jd = risk_total(phi, a - e, dp);
  return energy_difference_from(u_decomposition(phi, a, e), ja, jd, dp);
}

ExchangeReport energy_exchange_check(const Attack& phi, const CellSet& a, const CellSet& e, const DensityPair& dp,
                                     double delta) {
  require(delta > 0.0, ErrorCode::InvalidArgument, "delta must be > 0");
  const CellSet e_in = in_window(e);
  require(e_in.subset_of(margin_region(dp, delta)), ErrorCode::Precondition,
          "E must lie inside the margin region {w0 rho0 - w1 rho1 > delta}");
  const Grid& g = dp.g();
  const USetDecomposition d = u_decomposition(phi, a, e_in);
  const RiskReport ja = risk_total(phi, a, dp);
  const CellSet diff = a - e_in;
  const RiskReport jd = risk_total(phi, diff, dp);

  ExchangeReport rep;
  rep.energy_diff = (jd.total_exact - ja.total_exact).to_double();
  rep.hypothesis_met = ja.total_exact <= jd.total_exact;

  const CellSet a_in = in_window(a);
  const Mass lhs = deficit_rel_exact(lambda_sets(phi, a), dp, e_in);
  const Mass dec = deficit_rel_exact(lambda_sets(phi, e_in.complement()), dp, a_in);
  const Mass c0 = weighted_exact(d.Hat(11), 0, dp);
  const Mass c1 = weighted_exact(d.Hat(1), 1, dp);
  rep.overlap_volume = static_cast<double>((a_in & e_in).count()) * g.cell_volume();
  rep.lhs = lhs.to_double();
  rep.correction0 = c0.to_double();
  rep.correction1 = c1.to_double();
  const double base = dec.to_double() - delta * rep.overlap_volume;
  rep.rhs = base + (c0 + c1).to_double();
  if (rep.hypothesis_met) rep.violated = rep.lhs > rep.rhs + 1e-12;

  if (phi.kind() == AttackKind::Eps) {
    rep.eps_form_checked = true;
    CellSet hat11 = (e_in - a_in) & dilate(diff, phi.eps());
    hat11.set_outside(false);
    rep.eps_hat11_matches = hat11 == d.Hat(11);
    const double eps_rhs = base + c0.to_double();
    rep.eps_form_violated = !d.Hat(1).none() || !rep.eps_hat11_matches ||
                            (rep.hypothesis_met && rep.lhs > eps_rhs + 1e-12);
  }
  return rep;
}

}  // namespace advper

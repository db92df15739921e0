#include "advper/risks.hpp"

#include <cmath>

namespace advper {

namespace {

constexpr double kTol = 1e-12;

PerimeterValue perimeter_impl(const CellSet& a, double eps, const DensityPair& dp, const CellSet* e) {
  require(eps > 0.0, ErrorCode::InvalidArgument, "eps must be > 0");
  CellSet outer = dilate(a, eps) - a;
  CellSet inner = a - erode(a, eps);
  outer.set_outside(false);
  inner.set_outside(false);
  if (e) {
    outer &= *e;
    inner &= *e;
  }
  PerimeterValue v;
  v.exact = weighted_exact(outer, 0, dp) + weighted_exact(inner, 1, dp);
  v.scaled = v.exact.to_double();
  v.normalized = v.scaled / eps;
  return v;
}

CellSet in_window(const CellSet& s) {
  CellSet r = s;
  r.set_outside(false);
  return r;
}

}  // namespace

PerimeterValue eps_perimeter(const CellSet& a, double eps, const DensityPair& dp) {
  return perimeter_impl(a, eps, dp, nullptr);
}

PerimeterValue eps_perimeter_rel(const CellSet& a, double eps, const DensityPair& dp, const CellSet& e) {
  return perimeter_impl(a, eps, dp, &e);
}

double prob_perimeter(const CellSet& a, double eps, double p, const Kernel& kernel, const DensityPair& dp) {
  const ProbAttack phi(dp.grid, eps, p, kernel);
  return deficit_exact(lambda_sets(phi, a), dp).to_double();
}

double prob_perimeter_rel(const CellSet& a, double eps, double p, const Kernel& kernel, const DensityPair& dp,
                          const CellSet& e) {
  const ProbAttack phi(dp.grid, eps, p, kernel);
  return deficit_rel_exact(lambda_sets(phi, a), dp, e).to_double();
}

Mass deficit_exact(const LambdaSets& l, const DensityPair& dp) {
  return weighted_exact(l.lam0, 0, dp) + weighted_exact(l.lam1, 1, dp);
}

Mass deficit_rel_exact(const LambdaSets& l, const DensityPair& dp, const CellSet& e) {
  const CellSet ew = in_window(e);
  return weighted_exact(l.lam0 & ew, 0, dp) + weighted_exact(l.lam1 & ew, 1, dp);
}

double adversarial_deficit(const Attack& phi, const CellSet& a, const DensityPair& dp) {
  return deficit_exact(lambda_sets(phi, a), dp).to_double();
}

double adversarial_deficit_rel(const Attack& phi, const CellSet& a, const DensityPair& dp, const CellSet& e) {
  return deficit_rel_exact(lambda_sets(phi, a), dp, e).to_double();
}

RiskReport risk_from_lambda(const CellSet& a, const LambdaSets& l, const DensityPair& dp) {
  const CellSet a_in = in_window(a);
  const Mass c0 = weighted_exact(l.lam0 | a_in, 0, dp);
  const Mass c1 = weighted_exact(l.lam1 | a.window_complement(), 1, dp);
  const Mass bayes = bayes_risk_exact(a, dp);
  const Mass deficit = deficit_exact(l, dp);
  const Mass union_form = c0 + c1;
  const Mass split_form = bayes + deficit;
  RiskReport r;
  r.bayes = bayes.to_double();
  r.deficit = deficit.to_double();
  r.class0 = c0.to_double();
  r.class1 = c1.to_double();
  r.total = split_form.to_double();
  r.total_exact = split_form;
  if (std::abs(union_form.to_double() - r.total) > kTol)
    fail(ErrorCode::Internal, "risk union form and bayes + deficit disagree");
  return r;
}

RiskReport risk_total(const Attack& phi, const CellSet& a, const DensityPair& dp) {
  return risk_from_lambda(a, lambda_sets(phi, a), dp);
}

Mass risk_atp_supform_exact(const CellSet& a, double eps, const DensityPair& dp) {
  require(eps > 0.0, ErrorCode::InvalidArgument, "eps must be > 0");
  const Mass sup = weighted_exact(in_window(dilate(a, eps)), 0, dp) +
                   weighted_exact(erode(a, eps).window_complement(), 1, dp);
  const EpsAttack phi(dp.grid, eps);
  const RiskReport r = risk_total(phi, a, dp);
  if (std::abs(sup.to_double() - r.total) > kTol)
    fail(ErrorCode::Internal, "sup-form risk and perimeter-form risk disagree");
  return sup;
}

double risk_atp_supform(const CellSet& a, double eps, const DensityPair& dp) {
  return risk_atp_supform_exact(a, eps, dp).to_double();
}

BallPerimeterReport ball_perimeter_bound_check(const DensityPair& dp, double r, double eps,
                                               std::span<const double> center) {
  const Grid& g = dp.g();
  require(eps > 0.0, ErrorCode::InvalidArgument, "eps must be > 0");
  require(eps <= r, ErrorCode::Precondition, "ball perimeter bound needs eps <= R");
  require(center.size() == static_cast<std::size_t>(g.dim()), ErrorCode::InvalidArgument,
          "center has wrong dimension");
  for (int k = 0; k < g.dim(); ++k)
    require(center[k] - r - eps >= g.spec().lo[k] && center[k] + r + eps <= g.spec().hi[k], ErrorCode::Precondition,
            "ball plus eps-band must stay inside the window");
  const int d = g.dim();
  BallPerimeterReport rep;
  rep.alpha = dp.M * g.omega() * d * std::pow(2.0, d);
  rep.bound = rep.alpha * std::pow(r, d - 1) * eps;
  rep.slack = 2.0 * dp.M * g.omega() * d * std::pow(2.0 * r, d - 1) * g.h();
  const CellSet b = ball(dp.grid, center, r);
  rep.ball_scaled = eps_perimeter(b, eps, dp).scaled;
  rep.complement_scaled = eps_perimeter(b.complement(), eps, dp).scaled;
  const double limit = rep.bound + rep.slack + kTol;
  rep.passed = rep.ball_scaled <= limit && rep.complement_scaled <= limit;
  return rep;
}

DominationReport deficit_domination_check(const Attack& phi, const CellSet& a, const CellSet& e,
                                          const DensityPair& dp) {
  require(phi.kind() == AttackKind::Eps || phi.kind() == AttackKind::Prob, ErrorCode::Precondition,
          "deficit domination needs a metric attack");
  const Grid& g = dp.g();
  const double eps = phi.eps();
  const LambdaSets l = lambda_sets(phi, a);
  DominationReport rep;
  rep.deficit = deficit_exact(l, dp).to_double();
  rep.eps_per = eps_perimeter(a, eps, dp).scaled;
  rep.deficit_rel = deficit_rel_exact(l, dp, e).to_double();
  rep.eps_per_rel = eps_perimeter_rel(a, eps, dp, in_window(e)).scaled;
  rep.domination_ok = rep.deficit <= rep.eps_per + kTol;
  rep.domination_rel_ok = rep.deficit_rel <= rep.eps_per_rel + kTol;

  rep.lattice_tie = has_lattice_tie(g, eps);
  rep.collar = phi.closed_support() && rep.lattice_tie ? g.h() : 0.0;
  const CellSet far = dilate(in_window(e), eps + rep.collar).window_complement();
  const CellSet before = phi.attacked(a);
  const CellSet after = phi.attacked(a - e);
  far.for_each([&](std::size_t x) {
    ++rep.isolation.checked;
    if (before.test(x) != after.test(x)) rep.isolation.record(x);
  });
  return rep;
}

}  // namespace advper

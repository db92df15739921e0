#include "advper/convergence.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "advper/parallel.hpp"

namespace advper {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CellSet in_window(const CellSet& s) {
  CellSet r = s;
  r.set_outside(false);
  return r;
}

}  // namespace

CorralReport corral_check(const CellSet& a, const DensityPair& dp, double eta, const CellSet& k) {
  require(eta > 0.0, ErrorCode::InvalidArgument, "eta must be > 0");
  const CellSet bmax = bayes_max(dp), bmin = bayes_min(dp);
  const CellSet ak = in_window(a & k);
  CorralReport rep;
  rep.lower_ok = in_window(erode(bmin, eta) & k).subset_of(ak);
  rep.upper_ok = ak.subset_of(in_window(dilate(bmax, eta) & k));

  // A cell of A n K needs eta > d(x, bmax); a cell of K \ A needs
  // eta > d(x, bmin^c). The smallest passing eta sits just above the largest
  // such distance; report that distance.
  const auto to_max = distance_transform(bmax);
  const auto to_min_c = distance_transform(bmin.complement());
  double need = 0.0;
  const CellSet kw = in_window(k);
  kw.for_each([&](std::size_t x) {
    need = std::max(need, a.test(x) ? to_max[x] : to_min_c[x]);
  });
  rep.eta_min = need;
  rep.passed = rep.lower_ok && rep.upper_ok;
  return rep;
}

CellSet default_region(const GridPtr& grid, double eps_max) {
  return in_window(erode(CellSet::full(grid), 2.0 * eps_max + 2.0 * grid->h()));
}

std::vector<ConvergenceRecord> run_convergence_experiment(const DensityPair& dp, const ConvergenceConfig& cfg) {
  const Grid& g = dp.g();
  require(!cfg.eps_list.empty(), ErrorCode::InvalidArgument, "eps list is empty");
  for (std::size_t i = 0; i < cfg.eps_list.size(); ++i) {
    require(cfg.eps_list[i] >= 8.0 * g.h(), ErrorCode::InvalidArgument, "every eps must be >= 8h");
    require(i == 0 || cfg.eps_list[i] < cfg.eps_list[i - 1], ErrorCode::InvalidArgument,
            "eps list must be strictly decreasing");
  }
  // Zero-density cells are ties for every classifier, so distances are taken on K n supp(mu).
  const CellSet k = (cfg.region ? in_window(*cfg.region) : default_region(dp.grid, cfg.eps_list.front())) &
                    support_set(dp);
  const CellSet bmax = bayes_max(dp), bmin = bayes_min(dp);
  const bool degenerate = !(bmax == bmin);
  const CellSet bmax_k = bmax & k, bmin_k = bmin & k;
  const double bayes_value = bayes_risk(bmax, dp);

  std::vector<ConvergenceRecord> out(cfg.eps_list.size());
  SolverConfig scfg = cfg.solver;
  scfg.threads = 1;
  parallel_for(out.size(), cfg.threads, [&](std::size_t i) {
    const double eps = cfg.eps_list[i];
    const auto t0 = std::chrono::steady_clock::now();
    AttackPtr phi = cfg.kind == AttackKind::Prob ? attack_prob(dp.grid, eps, cfg.p, Kernel::uniform(g.dim(), g.norm()))
                                                 : attack_eps(dp.grid, eps);
    const SolveResult res = minimize(*phi, dp, scfg);
    ConvergenceRecord& rec = out[i];
    rec.eps = eps;
    rec.j_value = res.value;
    rec.bayes_value = bayes_value;
    rec.certificate = res.certificate;
    rec.boundary = res.boundary;
    rec.degenerate = degenerate;
    rec.hausdorff = hausdorff_distance(res.argmin, bmax, k);
    rec.hausdorff_max = hausdorff_distance(res.argmin | bmax, bmax, k);
    rec.hausdorff_min = hausdorff_distance(res.argmin & bmin, bmin, k);
    rec.eta_corral = corral_check(res.argmin, dp, g.h(), k).eta_min;
    rec.argmin = res.argmin;
    if (cfg.timing)
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });
  return out;
}

RateFit fit_rate(std::span<const ConvergenceRecord> records, double h) {
  std::vector<double> xs, ys;
  for (const auto& r : records)
    if (std::isfinite(r.hausdorff) && r.hausdorff > 2.0 * h && r.eps > 0.0) {
      xs.push_back(std::log(r.eps));
      ys.push_back(std::log(r.hausdorff));
    }
  require(xs.size() >= 3, ErrorCode::Precondition,
          "rate fit needs at least 3 records above the 2h quantization floor (have " + std::to_string(xs.size()) +
              ")");
  const auto n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  require(sxx > 0.0, ErrorCode::Precondition, "rate fit needs distinct eps values");
  RateFit fit;
  fit.exponent = sxy / sxx;
  fit.constant = my - fit.exponent * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.used = xs.size();
  return fit;
}

}  // namespace advper

#include "advper/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace advper {

namespace {

double param(const DensityParams& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void reject_unknown(const DensityParams& p, std::initializer_list<const char*> known, const std::string& preset) {
  for (const auto& [k, v] : p) {
    bool ok = false;
    for (const char* name : known) ok = ok || k == name;
    require(ok, ErrorCode::InvalidArgument, "preset '" + preset + "' has no parameter '" + k + "'");
  }
}

double gauss(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z);
}

// Distance from a cell center to the window boundary (continuous, per axis).
double edge_distance(const Grid& g, std::size_t idx) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < g.dim(); ++k) {
    const double c = g.center(idx, k);
    best = std::min({best, c - g.spec().lo[k], g.spec().hi[k] - c});
  }
  return best;
}

void check_weights(double w0, double w1) {
  require(w0 >= 0.0 && w1 >= 0.0 && std::abs(w0 + w1 - 1.0) <= 1e-12, ErrorCode::InvalidArgument,
          "class weights must be nonnegative and sum to 1");
}

}  // namespace

Mass Mass::from_double(double v) {
  Mass m;
  m.v_ = static_cast<__int128>(std::ldexp(v, kFracBits));
  return m;
}

double Mass::to_double() const { return std::ldexp(static_cast<double>(v_), -kFracBits); }

std::vector<std::string> density_presets() {
  return {"linear1d", "gauss1d", "gauss2d", "uniform_gap", "constant_sign"};
}

DensityPair make_density(const GridPtr& grid, double w0, double w1, std::vector<double> rho0,
                         std::vector<double> rho1, std::string name) {
  check_weights(w0, w1);
  const Grid& g = *grid;
  require(rho0.size() == g.size() && rho1.size() == g.size(), ErrorCode::InvalidArgument,
          "density has wrong number of cells");
  DensityPair dp;
  dp.grid = grid;
  dp.w0 = w0;
  dp.w1 = w1;
  dp.preset = std::move(name);
  for (auto* rho : {&rho0, &rho1}) {
    double total = 0.0;
    for (double v : *rho) {
      require(std::isfinite(v) && v >= 0.0, ErrorCode::InvalidArgument, "densities must be finite and >= 0");
      total += v;
    }
    total *= g.cell_volume();
    require(total > 0.0, ErrorCode::InvalidArgument, "density has zero mass on the grid");
    for (double& v : *rho) v /= total;
  }
  dp.rho0 = std::move(rho0);
  dp.rho1 = std::move(rho1);
  dp.M = std::max(*std::max_element(dp.rho0.begin(), dp.rho0.end()),
                  *std::max_element(dp.rho1.begin(), dp.rho1.end()));
  const std::size_t n = g.size();
  dp.cell0.resize(n);
  dp.cell1.resize(n);
  dp.weighted0.resize(n);
  dp.weighted1.resize(n);
  const double hv = g.cell_volume();
  for (std::size_t i = 0; i < n; ++i) {
    dp.cell0[i] = Mass::from_double(dp.rho0[i] * hv);
    dp.cell1[i] = Mass::from_double(dp.rho1[i] * hv);
    dp.weighted0[i] = Mass::from_double(w0 * dp.rho0[i] * hv);
    dp.weighted1[i] = Mass::from_double(w1 * dp.rho1[i] * hv);
  }
  return dp;
}

DensityPair build_density(const GridPtr& grid, const std::string& preset, const DensityParams& params) {
  const Grid& g = *grid;
  const std::size_t n = g.size();
  std::vector<double> r0(n, 0.0), r1(n, 0.0);
  double w0 = 0.5, w1 = 0.5;
  const double margin = param(params, "margin", 0.0);
  require(margin >= 0.0, ErrorCode::InvalidArgument, "support margin must be >= 0");

  if (preset == "linear1d") {
    reject_unknown(params, {"margin"}, preset);
    require(g.dim() == 1, ErrorCode::InvalidArgument, "linear1d needs a 1D grid");
    const double tol = 1e-9 * g.h();  // centers carry rounding error
    for (std::size_t i = 0; i < n; ++i) {
      const double x = g.center(i, 0);
      if (x >= -2.0 - tol && x <= 2.0 + tol) {
        r0[i] = std::max(0.0, (2.0 - x) / 8.0);
        r1[i] = std::max(0.0, (2.0 + x) / 8.0);
      }
    }
  } else if (preset == "gauss1d" || preset == "gauss2d") {
    const bool two = preset == "gauss2d";
    if (two)
      reject_unknown(params, {"margin", "w0", "w1", "mu0x", "mu0y", "mu1x", "mu1y", "sigma", "trunc"}, preset);
    else
      reject_unknown(params, {"margin", "w0", "w1", "mu0", "mu1", "sigma", "trunc"}, preset);
    require(g.dim() == (two ? 2 : 1), ErrorCode::InvalidArgument, preset + " needs a matching grid dimension");
    w0 = param(params, "w0", 0.5);
    w1 = param(params, "w1", 1.0 - w0);
    const double sigma = param(params, "sigma", 0.5);
    const double trunc = param(params, "trunc", 6.0);
    require(sigma > 0.0 && trunc > 0.0, ErrorCode::InvalidArgument, "sigma and trunc must be > 0");
    std::vector<double> mu0, mu1;
    if (two) {
      mu0 = {param(params, "mu0x", -1.0), param(params, "mu0y", 0.0)};
      mu1 = {param(params, "mu1x", 1.0), param(params, "mu1y", 0.0)};
    } else {
      mu0 = {param(params, "mu0", -1.0)};
      mu1 = {param(params, "mu1", 1.0)};
    }
    for (std::size_t i = 0; i < n; ++i) {
      double a = 1.0, b = 1.0;
      bool inside = true;
      for (int k = 0; k < g.dim(); ++k) {
        const double x = g.center(i, k);
        const double lo = std::min(mu0[k], mu1[k]) - trunc * sigma;
        const double hi = std::max(mu0[k], mu1[k]) + trunc * sigma;
        inside = inside && x >= lo - 1e-9 * g.h() && x <= hi + 1e-9 * g.h();
        a *= gauss(x, mu0[k], sigma);
        b *= gauss(x, mu1[k], sigma);
      }
      if (inside) {
        r0[i] = a;
        r1[i] = b;
      }
    }
  } else if (preset == "uniform_gap") {
    reject_unknown(params, {"margin", "gap"}, preset);
    require(g.dim() == 1, ErrorCode::InvalidArgument, "uniform_gap needs a 1D grid");
    const double gap = param(params, "gap", 0.5);
    const double lo = g.spec().lo[0], hi = g.spec().hi[0];
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    require(gap >= 0.0 && gap < 2.0 * half, ErrorCode::InvalidArgument, "gap must fit inside the window");
    for (std::size_t i = 0; i < n; ++i) {
      const double x = g.center(i, 0);
      const double r = std::abs(x - mid);
      double s = 0.0;
      if (r > gap / 2.0) s = 0.5 * (r - gap / 2.0) / (half - gap / 2.0);
      if (x > mid) s = -s;
      r0[i] = 1.0 + s;
      r1[i] = 1.0 - s;
    }
  } else if (preset == "constant_sign") {
    reject_unknown(params, {"margin", "w0", "w1"}, preset);
    w0 = param(params, "w0", 0.7);
    w1 = param(params, "w1", 1.0 - w0);
    require(w0 > w1, ErrorCode::InvalidArgument, "constant_sign needs w0 > w1");
    std::fill(r0.begin(), r0.end(), 1.0);
    std::fill(r1.begin(), r1.end(), 1.0);
  } else {
    fail(ErrorCode::InvalidArgument, "unknown density preset '" + preset + "'");
  }

  if (margin > 0.0)
    for (std::size_t i = 0; i < n; ++i)
      if ((r0[i] > 0.0 || r1[i] > 0.0) && edge_distance(g, i) < margin)
        fail(ErrorCode::InvalidArgument,
             "preset '" + preset + "' puts mass closer than the support margin to the window edge");
  return make_density(grid, w0, w1, std::move(r0), std::move(r1), preset);
}

DensityPair load_density_csv(const GridPtr& grid, const std::string& path, double w0, double w1) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open density file '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "rho0,rho1", ErrorCode::Schema, "density CSV header must be 'rho0,rho1'");
  std::vector<double> r0, r1;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream ss(line);
    std::string a, b;
    require(std::getline(ss, a, ',') && std::getline(ss, b), ErrorCode::Schema, "bad density row: " + line);
    try {
      r0.push_back(std::stod(a));
      r1.push_back(std::stod(b));
    } catch (const std::exception&) {
      fail(ErrorCode::Schema, "bad density row: " + line);
    }
  }
  require(r0.size() == grid->size(), ErrorCode::Schema,
          "density CSV has " + std::to_string(r0.size()) + " rows, grid has " + std::to_string(grid->size()));
  return make_density(grid, w0, w1, std::move(r0), std::move(r1), "csv");
}

std::vector<double> signed_margin(const DensityPair& dp) {
  std::vector<double> m(dp.rho0.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = dp.w0 * dp.rho0[i] - dp.w1 * dp.rho1[i];
  return m;
}

namespace {

Mass sum_over(const CellSet& s, const DensityPair& dp, const std::vector<Mass>& table) {
  require(s.grid().same_as(dp.g()), ErrorCode::GridMismatch, "set and density live on different grids");
  Mass total;
  s.for_each([&](std::size_t i) { total += table[i]; });
  return total;
}

}  // namespace

Mass measure_exact(const CellSet& s, int cls, const DensityPair& dp) {
  return sum_over(s, dp, cls == 0 ? dp.cell0 : dp.cell1);
}

Mass weighted_exact(const CellSet& s, int cls, const DensityPair& dp) {
  return sum_over(s, dp, cls == 0 ? dp.weighted0 : dp.weighted1);
}

double measure(const CellSet& s, int cls, const DensityPair& dp) { return measure_exact(s, cls, dp).to_double(); }

Mass bayes_risk_exact(const CellSet& a, const DensityPair& dp) {
  return weighted_exact(a, 0, dp) + weighted_exact(a.window_complement(), 1, dp);
}

double bayes_risk(const CellSet& a, const DensityPair& dp) { return bayes_risk_exact(a, dp).to_double(); }

// Zero-mass cells carry the exterior label 0, like cells outside the window.
CellSet support_set(const DensityPair& dp) {
  CellSet s(dp.grid);
  for (std::size_t i = 0; i < dp.rho0.size(); ++i)
    if (dp.rho0[i] > 0.0 || dp.rho1[i] > 0.0) s.set(i);
  return s;
}

CellSet bayes_max(const DensityPair& dp) {
  CellSet s(dp.grid);
  for (std::size_t i = 0; i < dp.rho0.size(); ++i) {
    const double a = dp.w1 * dp.rho1[i], b = dp.w0 * dp.rho0[i];
    if (a >= b && (dp.rho0[i] > 0.0 || dp.rho1[i] > 0.0)) s.set(i);
  }
  return s;
}

CellSet bayes_min(const DensityPair& dp) {
  CellSet s(dp.grid);
  for (std::size_t i = 0; i < dp.rho0.size(); ++i)
    if (dp.w1 * dp.rho1[i] > dp.w0 * dp.rho0[i]) s.set(i);
  return s;
}

CellSet margin_region(const DensityPair& dp, double delta) {
  require(delta >= 0.0, ErrorCode::InvalidArgument, "delta must be >= 0");
  CellSet s(dp.grid);
  const auto m = signed_margin(dp);
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] > delta) s.set(i);
  return s;
}

NondegeneracyReport nondegeneracy_check(const DensityPair& dp, double alpha) {
  const Grid& g = dp.g();
  const auto m = signed_margin(dp);
  auto supported = [&](std::size_t i) { return dp.rho0[i] > 0.0 || dp.rho1[i] > 0.0; };
  CellSet level(dp.grid);
  std::vector<std::ptrdiff_t> c(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!supported(i)) continue;
    if (m[i] == 0.0) {
      level.set(i);
      continue;
    }
    g.unravel(i, c.data());
    for (int k = 0; k < g.dim(); ++k) {
      if (c[k] + 1 >= static_cast<std::ptrdiff_t>(g.extent(k))) continue;
      const std::size_t j = i + g.stride(k);
      if (supported(j) && ((m[i] > 0.0) != (m[j] > 0.0) || m[j] == 0.0)) {
        level.set(i);
        level.set(j);
      }
    }
  }
  NondegeneracyReport rep;
  rep.bayes_gap = hausdorff_distance(bayes_max(dp), bayes_min(dp), CellSet::full(dp.grid));
  if (level.none()) {
    rep.vacuous = true;
    rep.passed = true;
    rep.min_gradient = std::numeric_limits<double>::infinity();
    return rep;
  }
  const CellSet near = dilate(level, 2.0 * g.h() * (1.0 + 1e-9));
  double min_grad = std::numeric_limits<double>::infinity();
  near.for_each([&](std::size_t i) {
    if (!supported(i)) return;
    g.unravel(i, c.data());
    double sq = 0.0;
    for (int k = 0; k < g.dim(); ++k) {
      const auto n = static_cast<std::ptrdiff_t>(g.extent(k));
      const std::size_t s = g.stride(k);
      const bool lo = c[k] > 0 && supported(i - s), hi = c[k] + 1 < n && supported(i + s);
      double d = 0.0;
      if (lo && hi)
        d = (m[i + s] - m[i - s]) / (2.0 * g.h());
      else if (hi)
        d = (m[i + s] - m[i]) / g.h();
      else if (lo)
        d = (m[i] - m[i - s]) / g.h();
      sq += d * d;
    }
    min_grad = std::min(min_grad, std::sqrt(sq));
    ++rep.cells_checked;
  });
  rep.min_gradient = min_grad;
  rep.passed = min_grad > alpha && rep.bayes_gap <= g.h() * (1.0 + 1e-9);
  return rep;
}

}  // namespace advper

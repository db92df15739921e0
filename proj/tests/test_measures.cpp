#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "advper/measures.hpp"
#include "support.hpp"

using namespace advper;
using namespace advper::testing;

namespace {

double normal_cdf(double x, double mu, double sigma) { return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0))); }

}  // namespace

TEST(Density, PresetsNormalizedAndBounded) {
  std::vector<std::pair<GridPtr, DensityPair>> cases;
  auto g1 = linear_grid();
  cases.emplace_back(g1, linear_density(g1));
  auto g2 = grid1d(-4.5, 4.5, 0.01);
  cases.emplace_back(g2, build_density(g2, "gauss1d", {{"w0", 0.3}, {"w1", 0.7}, {"trunc", 6.2}, {"margin", 0.4}}));
  auto g3 = gauss2d_grid();
  cases.emplace_back(g3, gauss2d_density(g3));
  auto g4 = grid1d(-1.0, 1.0, 0.01);
  cases.emplace_back(g4, build_density(g4, "uniform_gap", {}));
  cases.emplace_back(g4, build_density(g4, "constant_sign", {}));
  for (auto& [g, dp] : cases) {
    const CellSet full = CellSet::full(g);
    EXPECT_NEAR(measure(full, 0, dp), 1.0, 1e-6) << dp.preset;
    EXPECT_NEAR(measure(full, 1, dp), 1.0, 1e-6) << dp.preset;
    EXPECT_EQ(measure(CellSet(g), 0, dp), 0.0);
    EXPECT_NEAR(dp.w0 + dp.w1, 1.0, 1e-15);
    for (std::size_t i = 0; i < g->size(); ++i) {
      EXPECT_LE(dp.rho0[i], dp.M);
      EXPECT_LE(dp.rho1[i], dp.M);
    }
  }
}

TEST(Density, RejectsBadInput) {
  auto g = linear_grid();
  EXPECT_THROW(build_density(g, "nope", {}), Error);
  EXPECT_THROW(build_density(g, "linear1d", {{"sigma", 1.0}}), Error);
  EXPECT_THROW(build_density(g, "linear1d", {{"margin", 0.6}}), Error);
  EXPECT_THROW(build_density(g, "gauss2d", {}), Error);
  EXPECT_THROW(build_density(g, "constant_sign", {{"w0", 0.4}}), Error);
}

TEST(Density, LinearMarginCrossesZeroWithSlopeOneEighth) {
  auto g = linear_grid();
  const auto dp = linear_density(g);
  const auto m = signed_margin(dp);
  // Discrete normalizer of (2 - x) / 8 over the cells with center in [-2, 2].
  double z = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->center(i, 0);
    if (std::abs(x) <= 2.0 + 1e-9 * g->h()) z += (2.0 - x) / 8.0 * g->h();
  }
  EXPECT_NEAR(z, 1.0, 4 * g->h());
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->center(i, 0);
    EXPECT_EQ(m[i], dp.w0 * dp.rho0[i] - dp.w1 * dp.rho1[i]);
    if (std::abs(x) <= 2.0) EXPECT_NEAR(m[i], -x / (8.0 * z), 1e-12) << x;
    if (std::abs(x) > 2.0 + 1e-6) EXPECT_EQ(dp.rho0[i] + dp.rho1[i], 0.0) << x;
  }
  const auto rep = nondegeneracy_check(dp, 0.1);
  EXPECT_TRUE(rep.passed);
  EXPECT_FALSE(rep.vacuous);
  EXPECT_NEAR(rep.min_gradient, 0.125, 1e-3);
  EXPECT_LE(rep.bayes_gap, g->h());
}

TEST(Density, GaussSingleSignChange) {
  auto g = grid1d(-4.5, 4.5, 0.01);
  const auto dp = build_density(g, "gauss1d", {{"w0", 0.3}, {"w1", 0.7}, {"trunc", 6.2}, {"margin", 0.4}});
  const auto m = signed_margin(dp);
  int changes = 0;
  int last = 0;
  for (double v : m) {
    const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (s != 0 && last != 0 && s != last) ++changes;
    if (s != 0) last = s;
  }
  EXPECT_EQ(changes, 1);
}

TEST(Density, ClosedFormIntegrals) {
  auto g = linear_grid();
  const auto dp = linear_density(g);
  EXPECT_NEAR(measure(interval(g, 0.0, 2.0), 0, dp), 0.25, 0.01);
  EXPECT_NEAR(bayes_risk(interval(g, 0.0, 2.0), dp), 0.25, 0.01);

  auto g2 = grid1d(-4.5, 4.5, 0.01);
  const auto dp2 = build_density(g2, "gauss1d", {{"w0", 0.3}, {"w1", 0.7}, {"trunc", 6.2}, {"margin", 0.4}});
  const double lo = -1.0 - 6.2 * 0.5, hi = 1.0 + 6.2 * 0.5;
  const double z0 = normal_cdf(hi, -1.0, 0.5) - normal_cdf(lo, -1.0, 0.5);
  const double expect = (normal_cdf(hi, -1.0, 0.5) - normal_cdf(0.0, -1.0, 0.5)) / z0;
  EXPECT_NEAR(measure(interval(g2, 0.0, 4.5), 0, dp2), expect, 1e-5);
}

TEST(Density, BayesRiskDegenerateClassifiers) {
  auto g = linear_grid();
  const auto dp = linear_density(g);
  EXPECT_NEAR(bayes_risk(CellSet(g), dp), dp.w1, 1e-12);
  EXPECT_NEAR(bayes_risk(interval(g, -2.0, 2.0), dp), dp.w0, 1e-12);
}

TEST(Density, BayesSets) {
  auto g = linear_grid();
  const auto dp = linear_density(g);
  const CellSet bmax = bayes_max(dp), bmin = bayes_min(dp);
  EXPECT_TRUE(bmin.subset_of(bmax));
  EXPECT_LE(bmax.count() - bmin.count(), 1u);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->center(i, 0);
    if (x > 1e-9 && x <= 2.0) EXPECT_TRUE(bmin.test(i));
    if (x < -1e-9) EXPECT_FALSE(bmax.test(i));
  }

  auto g2 = grid1d(-1.0, 1.0, 0.01);
  const auto cs = build_density(g2, "constant_sign", {});
  EXPECT_TRUE(bayes_max(cs).none());
  EXPECT_TRUE(bayes_min(cs).none());
  EXPECT_TRUE(nondegeneracy_check(cs, 0.1).vacuous);

  const auto gap = build_density(g2, "uniform_gap", {{"gap", 0.5}});
  const CellSet band = bayes_max(gap) - bayes_min(gap);
  EXPECT_EQ(band, interval(g2, -0.25, 0.25));
  const auto rep = nondegeneracy_check(gap, 0.1);
  EXPECT_FALSE(rep.passed);
  EXPECT_NEAR(rep.bayes_gap, 0.5, g2->h());
}

TEST(Density, MarginRegion) {
  auto g = linear_grid();
  const auto dp = linear_density(g);
  const CellSet m0 = margin_region(dp, 0.0);
  const CellSet m5 = margin_region(dp, 0.05);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->center(i, 0);
    if (x >= -2.0 && x <= 2.0) EXPECT_EQ(m0.test(i), x < 0.0) << x;
    if (x >= -1.99 && x <= 2.0) EXPECT_EQ(m5.test(i), x < -0.4) << x;
  }
  EXPECT_TRUE(margin_region(dp, 1.0).none());
}

TEST(Density, BayesOptimalityAndTies) {
  auto g = linear_grid();
  const auto dp = linear_density(g);
  const double best = bayes_risk(bayes_max(dp), dp);
  EXPECT_NEAR(best, bayes_risk(bayes_min(dp), dp), 1e-9);
  EXPECT_NEAR(best, 0.25, 1e-3);
  for (const auto& a : random_sets(g, 41, 1000)) EXPECT_LE(best, bayes_risk(a, dp) + 1e-9);
}

TEST(Density, MeasureAdditivityExact) {
  auto g = gauss2d_grid();
  const auto dp = gauss2d_density(g);
  for (std::uint64_t t = 0; t < 50; ++t) {
    auto rng = make_stream(43, t);
    const CellSet s = random_set(g, rng), u = random_set(g, rng);
    for (int c : {0, 1})
      EXPECT_EQ(measure_exact(s | u, c, dp) + measure_exact(s & u, c, dp),
                measure_exact(s, c, dp) + measure_exact(u, c, dp));
  }
}

TEST(Density, CsvRoundTrip) {
  auto g = grid1d(0.0, 1.0, 0.25);
  const std::string path = ::testing::TempDir() + "density.csv";
  {
    std::ofstream out(path);
    out << "rho0,rho1\n1,3\n1,1\n1,0\n1,0\n";
  }
  const auto dp = load_density_csv(g, path, 0.5, 0.5);
  EXPECT_NEAR(dp.rho0[0], 1.0, 1e-15);
  EXPECT_NEAR(dp.rho1[0], 3.0, 1e-15);
  EXPECT_EQ(bayes_max(dp).to_rle(), "1:2,0:2");

  {
    std::ofstream out(path);
    out << "a,b\n1,1\n";
  }
  EXPECT_THROW(load_density_csv(g, path, 0.5, 0.5), Error);
  EXPECT_THROW(load_density_csv(g, path + ".missing", 0.5, 0.5), Error);
  std::remove(path.c_str());
}

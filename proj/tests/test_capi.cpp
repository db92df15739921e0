// Exercises the shared library through the C header only.
#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "advper.h"

namespace {

struct Deleter {
  void operator()(advper_grid* p) const { advper_grid_destroy(p); }
  void operator()(advper_set* p) const { advper_set_destroy(p); }
  void operator()(advper_density* p) const { advper_density_destroy(p); }
  void operator()(advper_attack* p) const { advper_attack_destroy(p); }
};
template <class T>
using Own = std::unique_ptr<T, Deleter>;

Own<advper_grid> grid1d(double lo, double hi, double h) {
  advper_grid* g = nullptr;
  EXPECT_EQ(advper_grid_create(1, &lo, &hi, h, ADVPER_NORM_L2, &g), ADVPER_OK);
  return Own<advper_grid>(g);
}

Own<advper_set> half_line(const advper_grid* g, double from) {
  size_t n = 0;
  advper_grid_cell_count(g, &n);
  std::vector<uint8_t> mask(n);
  for (size_t i = 0; i < n; ++i) {
    double x = 0.0;
    advper_grid_center(g, i, &x);
    mask[i] = x > from ? 1 : 0;
  }
  advper_set* s = nullptr;
  EXPECT_EQ(advper_set_create(g, mask.data(), &s), ADVPER_OK);
  return Own<advper_set>(s);
}

size_t count(const advper_set* s) {
  size_t n = 0;
  EXPECT_EQ(advper_set_count(s, &n), ADVPER_OK);
  return n;
}

}  // namespace

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_STREQ(advper_version(), "0.1.0");
  EXPECT_STREQ(advper_status_string(ADVPER_OK), "ok");
  EXPECT_STREQ(advper_status_string(ADVPER_NULL_HANDLE), "null handle");
  EXPECT_STREQ(advper_status_string(static_cast<advper_status>(99)), "unknown status");
}

TEST(CApi, GridCentersAndErrors) {
  auto g = grid1d(0.0, 1.0, 0.25);
  size_t n = 0;
  ASSERT_EQ(advper_grid_cell_count(g.get(), &n), ADVPER_OK);
  EXPECT_EQ(n, 4u);
  double x = 0.0;
  ASSERT_EQ(advper_grid_center(g.get(), 1, &x), ADVPER_OK);
  EXPECT_DOUBLE_EQ(x, 0.375);
  EXPECT_EQ(advper_grid_center(g.get(), 4, &x), ADVPER_INVALID_ARGUMENT);
  EXPECT_NE(std::strlen(advper_last_error()), 0u);

  advper_grid* bad = nullptr;
  const double lo = 0.0, hi = 1.0;
  EXPECT_EQ(advper_grid_create(1, &lo, &hi, -0.1, ADVPER_NORM_L2, &bad), ADVPER_INVALID_ARGUMENT);
  EXPECT_EQ(bad, nullptr);
  EXPECT_EQ(advper_grid_create(0, &lo, &hi, 0.1, ADVPER_NORM_L2, &bad), ADVPER_INVALID_ARGUMENT);
  EXPECT_EQ(advper_grid_create(1, &lo, &hi, 0.1, static_cast<advper_norm>(7), &bad), ADVPER_INVALID_ARGUMENT);
  EXPECT_EQ(advper_grid_create(1, nullptr, &hi, 0.1, ADVPER_NORM_L2, &bad), ADVPER_NULL_HANDLE);
  EXPECT_EQ(advper_grid_cell_count(nullptr, &n), ADVPER_NULL_HANDLE);
  EXPECT_STREQ(advper_last_error(), "null handle or output pointer");
  ASSERT_EQ(advper_grid_cell_count(g.get(), &n), ADVPER_OK);
  EXPECT_EQ(advper_grid_center(g.get(), 0, &x), ADVPER_OK);
  EXPECT_STREQ(advper_last_error(), "");
  advper_grid_destroy(nullptr);
}

TEST(CApi, SetAlgebraAndMorphology) {
  auto g = grid1d(-1.0, 1.0, 0.1);
  auto a = half_line(g.get(), 0.0);
  EXPECT_EQ(count(a.get()), 10u);
  std::vector<uint8_t> mask(20);
  ASSERT_EQ(advper_set_to_mask(a.get(), mask.data(), mask.size()), ADVPER_OK);
  EXPECT_EQ(mask[9], 0);
  EXPECT_EQ(mask[10], 1);
  EXPECT_EQ(advper_set_to_mask(a.get(), mask.data(), 3), ADVPER_INVALID_ARGUMENT);

  advper_set *dil = nullptr, *ero = nullptr, *comp = nullptr, *u = nullptr, *in = nullptr, *diff = nullptr;
  ASSERT_EQ(advper_set_dilate(a.get(), 0.25, &dil), ADVPER_OK);
  ASSERT_EQ(advper_set_erode(a.get(), 0.25, &ero), ADVPER_OK);
  ASSERT_EQ(advper_set_complement(a.get(), &comp), ADVPER_OK);
  ASSERT_EQ(advper_set_union(a.get(), comp, &u), ADVPER_OK);
  ASSERT_EQ(advper_set_intersect(a.get(), comp, &in), ADVPER_OK);
  ASSERT_EQ(advper_set_difference(dil, ero, &diff), ADVPER_OK);
  Own<advper_set> o1(dil), o2(ero), o3(comp), o4(u), o5(in), o6(diff);
  EXPECT_EQ(count(dil), 12u);
  EXPECT_EQ(count(comp), 10u);
  EXPECT_EQ(count(u), 20u);
  EXPECT_EQ(count(in), 0u);
  EXPECT_EQ(count(diff), count(dil) - count(ero));
  EXPECT_EQ(advper_set_dilate(a.get(), -1.0, &dil), ADVPER_INVALID_ARGUMENT);

  double d = -1.0;
  auto all = half_line(g.get(), -10.0);
  ASSERT_EQ(advper_hausdorff(a.get(), dil, all.get(), &d), ADVPER_OK);
  EXPECT_NEAR(d, 0.2, 1e-12);

  const double c = 0.05;
  advper_set* b = nullptr;
  ASSERT_EQ(advper_set_ball(g.get(), &c, 0.11, &b), ADVPER_OK);
  Own<advper_set> ob(b);
  EXPECT_EQ(count(b), 3u);

  auto other = grid1d(-1.0, 1.0, 0.05);
  auto foreign = half_line(other.get(), 0.0);
  advper_set* mixed = nullptr;
  EXPECT_EQ(advper_set_union(a.get(), foreign.get(), &mixed), ADVPER_GRID_MISMATCH);
  EXPECT_EQ(mixed, nullptr);
}

TEST(CApi, DensityRiskAndAttacks) {
  auto g = grid1d(-2.50625, 2.50625, 0.0125);
  advper_density* raw = nullptr;
  ASSERT_EQ(advper_density_preset(g.get(), "linear1d", "{\"margin\": 0.5}", &raw), ADVPER_OK);
  Own<advper_density> dp(raw);
  EXPECT_EQ(advper_density_preset(g.get(), "linear1d", "{\"margin\": \"x\"}", &raw), ADVPER_SCHEMA);
  EXPECT_EQ(advper_density_preset(g.get(), "linear1d", "[1]", &raw), ADVPER_SCHEMA);
  EXPECT_EQ(advper_density_preset(g.get(), "nope", nullptr, &raw), ADVPER_INVALID_ARGUMENT);
  EXPECT_EQ(advper_density_csv(g.get(), "/nonexistent/density.csv", 0.5, 0.5, &raw), ADVPER_IO);

  advper_set *bmax = nullptr, *bmin = nullptr, *margin = nullptr;
  ASSERT_EQ(advper_density_bayes_max(dp.get(), &bmax), ADVPER_OK);
  ASSERT_EQ(advper_density_bayes_min(dp.get(), &bmin), ADVPER_OK);
  ASSERT_EQ(advper_density_margin_region(dp.get(), 0.05, &margin), ADVPER_OK);
  Own<advper_set> o1(bmax), o2(bmin), o3(margin);
  EXPECT_LE(count(bmax) - count(bmin), 1u);

  double m = 0.0, br = 0.0;
  ASSERT_EQ(advper_measure(bmax, 1, dp.get(), &m), ADVPER_OK);
  EXPECT_NEAR(m, 0.75, 0.01);
  EXPECT_EQ(advper_measure(bmax, 2, dp.get(), &m), ADVPER_INVALID_ARGUMENT);
  ASSERT_EQ(advper_bayes_risk(bmax, dp.get(), &br), ADVPER_OK);
  EXPECT_NEAR(br, 0.25, 1e-3);

  advper_attack *eps = nullptr, *prob = nullptr;
  ASSERT_EQ(advper_attack_eps(g.get(), 0.10625, &eps), ADVPER_OK);
  ASSERT_EQ(advper_attack_prob(g.get(), 0.10625, 0.3, &prob), ADVPER_OK);
  Own<advper_attack> oe(eps), op(prob);
  EXPECT_EQ(advper_attack_prob(g.get(), 0.10625, 1.5, &prob), ADVPER_INVALID_ARGUMENT);

  advper_risk r{};
  ASSERT_EQ(advper_risk_total(eps, bmin, dp.get(), &r), ADVPER_OK);
  EXPECT_NEAR(r.total, r.bayes + r.deficit, 1e-12);
  double per = 0.0;
  ASSERT_EQ(advper_eps_perimeter(bmin, 0.10625, dp.get(), &per), ADVPER_OK);
  EXPECT_NEAR(per, r.deficit, 1e-15);

  advper_set *att = nullptr, *l0 = nullptr, *l1 = nullptr;
  ASSERT_EQ(advper_attacked(eps, bmin, &att), ADVPER_OK);
  ASSERT_EQ(advper_lambda_sets(eps, bmin, &l0, &l1, nullptr, nullptr), ADVPER_OK);
  Own<advper_set> oa(att), ol0(l0), ol1(l1);
  EXPECT_EQ(count(att), count(l0) + count(l1));

  advper_risk rp{};
  ASSERT_EQ(advper_risk_total(prob, bmin, dp.get(), &rp), ADVPER_OK);
  EXPECT_LE(rp.total, r.total + 1e-12);

  const double c = -1.0;
  advper_set* e = nullptr;
  ASSERT_EQ(advper_set_ball(g.get(), &c, 0.1, &e), ADVPER_OK);
  Own<advper_set> oball(e);
  advper_exchange ex{};
  ASSERT_EQ(advper_energy_exchange(eps, bmin, e, dp.get(), 0.05, &ex), ADVPER_OK);
  EXPECT_EQ(ex.violated, 0);
  EXPECT_EQ(ex.identities_ok, 1);
  EXPECT_NEAR(ex.energy_diff, ex.exact_diff_rhs, 1e-12);
  EXPECT_EQ(advper_energy_exchange(eps, bmin, e, dp.get(), 0.0, &ex), ADVPER_INVALID_ARGUMENT);
}

TEST(CApi, MinimizeMethods) {
  auto g = grid1d(-2.4, 2.4, 0.3);
  advper_density* raw = nullptr;
  ASSERT_EQ(advper_density_preset(g.get(), "linear1d", nullptr, &raw), ADVPER_OK);
  Own<advper_density> dp(raw);
  advper_attack* eps = nullptr;
  ASSERT_EQ(advper_attack_eps(g.get(), 0.45, &eps), ADVPER_OK);
  Own<advper_attack> oe(eps);

  advper_solve_options opt{ADVPER_SOLVER_BRUTE, 1, 200, 4, 1};
  advper_solve_result brute{}, local{}, interval{};
  advper_set* arg = nullptr;
  ASSERT_EQ(advper_minimize(eps, dp.get(), &opt, &brute, &arg), ADVPER_OK);
  Own<advper_set> oarg(arg);
  EXPECT_EQ(brute.global, 1);
  advper_risk r{};
  ASSERT_EQ(advper_risk_total(eps, arg, dp.get(), &r), ADVPER_OK);
  EXPECT_EQ(r.total, brute.value);

  opt.method = ADVPER_SOLVER_LOCAL;
  ASSERT_EQ(advper_minimize(eps, dp.get(), &opt, &local, nullptr), ADVPER_OK);
  EXPECT_EQ(local.global, 0);
  EXPECT_GE(local.value, brute.value - 1e-15);
  opt.method = ADVPER_SOLVER_INTERVAL;
  ASSERT_EQ(advper_minimize(eps, dp.get(), &opt, &interval, nullptr), ADVPER_OK);
  EXPECT_GE(interval.value, brute.value - 1e-15);
  opt.method = static_cast<advper_solver_method>(9);
  EXPECT_EQ(advper_minimize(eps, dp.get(), &opt, &interval, nullptr), ADVPER_INVALID_ARGUMENT);
  opt.method = ADVPER_SOLVER_LOCAL;
  opt.restarts = 0;
  EXPECT_EQ(advper_minimize(eps, dp.get(), &opt, &interval, nullptr), ADVPER_INVALID_ARGUMENT);
}

TEST(CApi, RunSubcommand) {
  namespace fs = std::filesystem;
  const std::string cfg = std::string(ADVPER_CONFIG_DIR) + "/solve_linear1d_16.json";
  const fs::path out = fs::path(::testing::TempDir()) / "advper_capi_run";
  fs::remove_all(out);
  int code = -1;
  ASSERT_EQ(advper_run("solve", cfg.c_str(), out.string().c_str(), 1, 1, 3, &code), ADVPER_OK);
  EXPECT_EQ(code, 0);
  EXPECT_TRUE(fs::exists(out / "solve.csv"));
  const std::string bad = std::string(ADVPER_CONFIG_DIR) + "/bad_eps_order.json";
  ASSERT_EQ(advper_run("solve", bad.c_str(), out.string().c_str(), 1, 0, 0, &code), ADVPER_OK);
  EXPECT_EQ(code, 2);
  EXPECT_EQ(advper_run(nullptr, cfg.c_str(), nullptr, 1, 0, 0, &code), ADVPER_NULL_HANDLE);
}

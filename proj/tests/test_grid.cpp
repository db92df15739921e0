#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "advper/grid.hpp"
#include "support.hpp"

using namespace advper;
using namespace advper::testing;

TEST(Grid, CellCentersAndCount) {
  auto g = grid1d(0.0, 1.0, 0.5);
  ASSERT_EQ(g->size(), 2u);
  EXPECT_DOUBLE_EQ(g->center(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(g->center(1, 0), 0.75);
  EXPECT_EQ(grid2d(0.0, 1.0, 0.5)->size(), 4u);
}

TEST(Grid, RowMajorLastAxisFastest) {
  GridSpec s;
  s.dim = 2;
  s.lo = {0.0, 0.0};
  s.hi = {2.0, 3.0};
  s.h = 1.0;
  auto g = make_grid(s);
  ASSERT_EQ(g->size(), 6u);
  EXPECT_DOUBLE_EQ(g->center(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(g->center(1, 1), 1.5);
  EXPECT_DOUBLE_EQ(g->center(3, 0), 1.5);
  EXPECT_DOUBLE_EQ(g->center(3, 1), 0.5);
}

TEST(Grid, RejectsBadSpecs) {
  EXPECT_THROW(grid1d(0.0, 1.0, 0.3), Error);
  EXPECT_THROW(grid1d(0.0, 1.0, -0.1), Error);
  GridSpec s;
  s.dim = 2;
  s.lo = {0.0, 0.0};
  s.hi = {1.0, 1.0};
  s.h = 1e-3;
  s.max_cells = 1000;
  EXPECT_THROW(make_grid(s), Error);
}

TEST(Grid, UnitBallVolumes) {
  EXPECT_NEAR(unit_ball_volume(1, Norm::L2), 2.0, 1e-12);
  EXPECT_NEAR(unit_ball_volume(2, Norm::L2), std::numbers::pi, 1e-12);
  EXPECT_NEAR(unit_ball_volume(3, Norm::L2), 4.0 / 3.0 * std::numbers::pi, 1e-12);
  EXPECT_NEAR(unit_ball_volume(4, Norm::L2), std::numbers::pi * std::numbers::pi / 2.0, 1e-12);
  EXPECT_NEAR(unit_ball_volume(3, Norm::LInf), 8.0, 1e-12);
  EXPECT_NEAR(unit_ball_volume(3, Norm::L1), 8.0 / 6.0, 1e-12);
  EXPECT_NEAR(unit_ball_volume(2, Norm::L1), 2.0, 1e-12);
}

TEST(DistanceTransform, TwoCells) {
  auto g = grid1d(0.0, 1.0, 0.5);
  CellSet s(g);
  s.set(0);
  const auto d = distance_transform(s);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_DOUBLE_EQ(d[1], 0.5);
}

TEST(DistanceTransform, EmptyIsInfinite) {
  auto g = grid2d(0.0, 1.0, 0.1);
  for (double v : distance_transform(CellSet(g))) EXPECT_TRUE(std::isinf(v));
}

class DistanceOracle : public ::testing::TestWithParam<Norm> {};

TEST_P(DistanceOracle, MatchesPairwiseMinimumExactly) {
  const Norm norm = GetParam();
  for (auto g : {grid1d(-1.0, 1.0, 0.02, norm), grid2d(-1.0, 1.0, 0.05, norm)}) {
    for (std::uint64_t t = 0; t < 6; ++t) {
      auto rng = make_stream(17, t);
      CellSet s = random_set(g, rng);
      s.set_outside(t % 3 == 2);
      const auto d = distance_transform(s);
      for (std::size_t x = 0; x < g->size(); ++x) ASSERT_EQ(d[x], distance_oracle(s, x)) << "cell " << x;
    }
  }
}

TEST_P(DistanceOracle, SingleSourceMatchesGeometry) {
  const Norm norm = GetParam();
  auto g = grid2d(-1.0, 1.0, 0.05, norm);
  CellSet s(g);
  const std::size_t src = 13 * 40 + 27;
  s.set(src);
  const auto d = distance_transform(s);
  auto rng = make_stream(3, 0);
  for (int k = 0; k < 20; ++k) {
    const std::size_t x = uniform_index(rng, g->size());
    std::vector<double> diff{g->center(x, 0) - g->center(src, 0), g->center(x, 1) - g->center(src, 1)};
    EXPECT_NEAR(d[x], g->coord_norm(diff), 1e-12);
  }
}

TEST_P(DistanceOracle, OneLipschitz) {
  const Norm norm = GetParam();
  auto g = grid2d(-1.0, 1.0, 0.05, norm);
  auto rng = make_stream(8, 1);
  const CellSet s = random_set(g, rng);
  const auto d = distance_transform(s);
  for (int k = 0; k < 2000; ++k) {
    const std::size_t x = uniform_index(rng, g->size()), y = uniform_index(rng, g->size());
    EXPECT_LE(std::abs(d[x] - d[y]), pair_distance(*g, x, y) + 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Norms, DistanceOracle, ::testing::Values(Norm::L1, Norm::L2, Norm::LInf));

TEST(Morphology, DilateIntervalExample) {
  auto g = grid1d(-1.0, 1.5, 0.01);
  const CellSet a = interval(g, 0.0, 0.5);
  const CellSet d = dilate(a, 0.105);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->center(i, 0);
    EXPECT_EQ(d.test(i), distance_oracle(a, i) < 0.105) << x;
    if (x > -0.1 && x < 0.6) EXPECT_TRUE(d.test(i)) << x;
    if (x < -0.1 || x > 0.6) EXPECT_FALSE(d.test(i)) << x;
  }
}

TEST(Morphology, DilateTrivialCases) {
  auto g = grid1d(-1.0, 1.0, 0.01);
  EXPECT_TRUE(dilate(CellSet(g), 0.3).none());
  auto rng = make_stream(1, 1);
  const CellSet a = random_set(g, rng);
  EXPECT_EQ(dilate(a, 0.0), a);
  EXPECT_THROW(dilate(a, -0.1), Error);
  EXPECT_THROW(erode(a, -0.1), Error);
}

TEST(Morphology, ErodeIntervalExample) {
  auto g = grid1d(-1.0, 2.0, 0.01);
  const CellSet e = erode(interval(g, 0.0, 1.0), 0.105);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->center(i, 0);
    if (x > 0.1 && x < 0.9) EXPECT_TRUE(e.test(i)) << x;
    if (x < 0.1 || x > 0.9) EXPECT_FALSE(e.test(i)) << x;
  }
  EXPECT_TRUE(erode(CellSet(g), 0.1).none());
}

TEST(Morphology, ErodeFullWindowShrinksFromEdge) {
  auto g = grid2d(0.0, 1.0, 0.02);
  const CellSet full = CellSet::full(g);
  const CellSet e = erode(full, 0.1);
  for (std::size_t i = 0; i < g->size(); ++i) EXPECT_EQ(e.test(i), exterior_oracle(*g, i) >= 0.1);
}

TEST(Morphology, Duality) {
  for (Norm n : {Norm::L1, Norm::L2, Norm::LInf}) {
    auto g = grid2d(-1.0, 1.0, 0.04, n);
    for (std::uint64_t t = 0; t < 20; ++t) {
      auto rng = make_stream(23, t);
      CellSet a = random_set(g, rng);
      a.set_outside(t % 2 == 1);
      for (double eps : {0.05, 0.13, 0.31}) EXPECT_EQ(erode(a, eps), dilate(a.complement(), eps).complement());
    }
  }
}

TEST(Morphology, MonotoneAndNested) {
  auto g = grid2d(-1.0, 1.0, 0.04);
  for (std::uint64_t t = 0; t < 20; ++t) {
    auto rng = make_stream(29, t);
    const CellSet a = random_set(g, rng);
    const CellSet e = a | random_set(g, rng);
    for (double eps : {0.05, 0.21}) {
      EXPECT_TRUE(dilate(a, eps).subset_of(dilate(e, eps)));
      EXPECT_TRUE(erode(a, eps).subset_of(erode(e, eps)));
      EXPECT_TRUE(erode(a, eps).subset_of(a));
      EXPECT_TRUE(a.subset_of(dilate(a, eps)));
    }
  }
}

TEST(CellSetOps, ComplementInvolution) {
  auto g = grid2d(-1.0, 1.0, 0.1);
  auto rng = make_stream(2, 2);
  CellSet a = random_set(g, rng);
  EXPECT_EQ(a.complement().complement(), a);
  EXPECT_TRUE(a.complement().outside());
  EXPECT_FALSE(a.window_complement().outside());
  EXPECT_EQ(a.count() + a.complement().count(), g->size());
}

TEST(CellSetOps, GridMismatchRejected) {
  CellSet a(grid1d(0.0, 1.0, 0.1));
  CellSet b(grid1d(0.0, 1.0, 0.05));
  EXPECT_THROW(a |= b, Error);
}

TEST(CellSetOps, RleRoundTrip) {
  auto g = grid2d(-1.0, 1.0, 0.1);
  for (std::uint64_t t = 0; t < 10; ++t) {
    auto rng = make_stream(4, t);
    const CellSet a = random_set(g, rng);
    EXPECT_EQ(CellSet::from_rle(g, a.to_rle()), a);
  }
  EXPECT_EQ(interval(grid1d(0.0, 1.0, 0.25), 0.4, 1.0).to_rle(), "0:2,1:2");
}

TEST(Ball, OpenAndCounted) {
  auto g1 = grid1d(-1.0, 1.0, 0.01);
  const std::vector<double> c1{0.0};
  EXPECT_TRUE(ball(g1, c1, 0.0).none());
  const CellSet b = ball(g1, c1, 0.5);
  EXPECT_EQ(b.count(), 100u);
  EXPECT_NEAR(b.count() * g1->cell_volume(), 1.0, 0.02);

  auto g2 = grid2d(-1.5, 1.5, 0.01);
  const std::vector<double> c2{0.0, 0.0};
  EXPECT_NEAR(ball(g2, c2, 1.0).count() * g2->cell_volume(), std::numbers::pi, 0.05);
}

TEST(Ball, VolumeWithinQuadratureSlack) {
  for (Norm n : {Norm::L1, Norm::L2, Norm::LInf}) {
    auto g = grid2d(-1.0, 1.0, 0.02, n);
    const std::vector<double> c{0.013, -0.007};
    for (double r : {0.3, 0.55, 0.8}) {
      const double vol = ball(g, c, r).count() * g->cell_volume();
      const double exact = g->omega() * r * r;
      EXPECT_LE(std::abs(vol - exact), 2.0 * 2.0 * g->omega() * r * g->h());
    }
  }
}

TEST(Hausdorff, Conventions) {
  auto g = grid1d(-1.0, 2.0, 0.01);
  const CellSet k = CellSet::full(g);
  const CellSet a = interval(g, 0.0, 1.0);
  EXPECT_EQ(hausdorff_distance(a, a, k), 0.0);
  EXPECT_EQ(hausdorff_distance(CellSet(g), CellSet(g), k), 0.0);
  EXPECT_TRUE(std::isinf(hausdorff_distance(a, CellSet(g), k)));
  EXPECT_NEAR(hausdorff_distance(a, interval(g, 0.2, 1.0), k), 0.2, g->h());
}

TEST(Hausdorff, MatchesBruteForce) {
  auto g = grid2d(-1.0, 1.0, 0.05);
  for (std::uint64_t t = 0; t < 8; ++t) {
    auto rng = make_stream(31, t);
    const CellSet a = random_set(g, rng), b = random_set(g, rng), k = random_set(g, rng);
    const CellSet ak = a & k, bk = b & k;
    if (ak.none() || bk.none()) continue;
    double brute = 0.0;
    ak.for_each([&](std::size_t x) { brute = std::max(brute, distance_oracle(bk, x)); });
    bk.for_each([&](std::size_t x) { brute = std::max(brute, distance_oracle(ak, x)); });
    EXPECT_EQ(hausdorff_distance(a, b, k), brute);
  }
}

TEST(Hausdorff, SandwichAndTriangle) {
  auto g = grid2d(-1.0, 1.0, 0.04);
  const CellSet k = CellSet::full(g);
  for (std::uint64_t t = 0; t < 20; ++t) {
    auto rng = make_stream(37, t);
    const CellSet a = random_set(g, rng);
    if (a.none()) continue;
    const double eta = 0.05 + 0.2 * uniform01(rng);
    const CellSet e = a | (random_set(g, rng) & dilate(a, eta));
    EXPECT_LE(hausdorff_distance(a, e, k), eta);

    const CellSet b = random_set(g, rng), c = random_set(g, rng);
    if (b.none() || c.none()) continue;
    EXPECT_LE(hausdorff_distance(a, c, k), hausdorff_distance(a, b, k) + hausdorff_distance(b, c, k) + 2 * g->h());
  }
}

TEST(LatticeTie, DetectsExactOffsets) {
  auto g = grid2d(-1.0, 1.0, 0.1);
  EXPECT_TRUE(has_lattice_tie(*g, 0.5));
  EXPECT_TRUE(has_lattice_tie(*g, 0.5 * std::sqrt(2.0)));
  EXPECT_FALSE(has_lattice_tie(*g, 0.45));
}

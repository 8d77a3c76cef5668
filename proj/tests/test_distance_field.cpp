#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "blowbot/distance_field.hpp"
#include "oracles.hpp"

using namespace blowbot;

using oracle::random_grid;

TEST(DistanceField, SourceIsZero) {
  Grid<Occupancy> g = Grid<Occupancy>::Constant(5, 5, Occupancy::Free);
  const Cell s{2, 3};
  const DistanceField f = distance_field(g, std::span<const Cell>(&s, 1), UnknownAs::Free);
  EXPECT_EQ(f.at(s), 0.0);
}

TEST(DistanceField, OppositeCornerOfThreeByThree) {
  Grid<Occupancy> g = Grid<Occupancy>::Constant(3, 3, Occupancy::Free);
  const Cell s{0, 0};
  const DistanceField f = distance_field(g, std::span<const Cell>(&s, 1), UnknownAs::Free, 0.02);
  EXPECT_DOUBLE_EQ(f.at({2, 2}), 2.0 * std::sqrt(2.0) * 0.02);
  EXPECT_DOUBLE_EQ(f.at({0, 2}), 0.04);
}

TEST(DistanceField, SeparatedRegionIsInfinite) {
  Grid<Occupancy> g = Grid<Occupancy>::Constant(6, 6, Occupancy::Free);
  g.col(3).setConstant(Occupancy::Occupied);
  const Cell s{0, 0};
  const DistanceField f = distance_field(g, std::span<const Cell>(&s, 1), UnknownAs::Free);
  for (int r = 0; r < 6; ++r) {
    EXPECT_TRUE(std::isinf(f.at({r, 4})));
    EXPECT_TRUE(std::isinf(f.at({r, 3})));
    EXPECT_TRUE(f.reachable({r, 2}));
  }
}

TEST(DistanceField, AllSourcesOccupiedGivesInfiniteField) {
  Grid<Occupancy> g = Grid<Occupancy>::Constant(4, 4, Occupancy::Free);
  g(1, 1) = Occupancy::Occupied;
  const Cell s{1, 1};
  const DistanceField f = distance_field(g, std::span<const Cell>(&s, 1), UnknownAs::Free);
  EXPECT_TRUE((f.distance == kInfinity).all());
}

TEST(DistanceField, UnknownHandling) {
  Grid<Occupancy> g = Grid<Occupancy>::Constant(1, 5, Occupancy::Free);
  g(0, 2) = Occupancy::Unknown;
  const Cell s{0, 0};
  EXPECT_DOUBLE_EQ(distance_field(g, std::span<const Cell>(&s, 1), UnknownAs::Free, 1.0).at({0, 4}), 4.0);
  EXPECT_TRUE(std::isinf(distance_field(g, std::span<const Cell>(&s, 1), UnknownAs::Occupied, 1.0).at({0, 4})));
}

TEST(DistanceField, MatchesDijkstraOracleExactly) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Grid<Occupancy> g = random_grid(20, 20, 0.25, 0.1, rng);
    std::vector<Cell> sources;
    const int n = 1 + trial % 3;
    for (int i = 0; i < n; ++i) {
      sources.push_back({static_cast<int>(rng() % 20), static_cast<int>(rng() % 20)});
    }
    for (bool unknown_free : {true, false}) {
      const DistanceField f =
          distance_field(g, sources, unknown_free ? UnknownAs::Free : UnknownAs::Occupied, 0.02);
      const Grid<double> expect = oracle::dijkstra(g, sources, unknown_free, 0.02);
      ASSERT_TRUE((f.distance == expect).all()) << "trial " << trial;
    }
  }
}

TEST(DistanceField, NoLocalMinima) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Grid<Occupancy> g = random_grid(20, 20, 0.3, 0.0, rng);
    const Cell s{static_cast<int>(rng() % 20), static_cast<int>(rng() % 20)};
    const DistanceField f = distance_field(g, std::span<const Cell>(&s, 1), UnknownAs::Free);
    ASSERT_TRUE(oracle::no_local_minima(f.distance)) << "trial " << trial;
  }
}

TEST(DistanceField, SampleInterpolatesBetweenCentres) {
  Grid<Occupancy> g = Grid<Occupancy>::Constant(1, 4, Occupancy::Free);
  const Cell s{0, 0};
  const DistanceField f = distance_field(g, std::span<const Cell>(&s, 1), UnknownAs::Free, 1.0);
  EXPECT_DOUBLE_EQ(f.sample({0.5, 0.5}), 0.0);
  EXPECT_DOUBLE_EQ(f.sample({1.25, 0.5}), 0.75);
  EXPECT_DOUBLE_EQ(f.sample({3.5, 0.5}), 3.0);
}

TEST(PlanPath, SameCell) {
  Grid<Occupancy> g = Grid<Occupancy>::Constant(5, 5, Occupancy::Free);
  const Path p = plan_path(g, {2, 2}, {2, 2});
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0], (Cell{2, 2}));
}

TEST(PlanPath, CorridorLengthMatchesField) {
  Grid<Occupancy> g = Grid<Occupancy>::Constant(3, 12, Occupancy::Occupied);
  g.row(1).setConstant(Occupancy::Free);
  const Path p = plan_path(g, {1, 0}, {1, 11}, 0.02);
  ASSERT_EQ(p.size(), 12u);
  double length = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    length += std::hypot(p[i].row - p[i - 1].row, p[i].col - p[i - 1].col) * 0.02;
  }
  const std::vector<Cell> src{{1, 11}};
  const Grid<double> d = oracle::dijkstra(g, src, false, 0.02);
  EXPECT_NEAR(length, d(1, 0), 0.02 + 1e-12);
}

TEST(PlanPath, PathsAreConnectedAndAvoidObstacles) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    Grid<Occupancy> g = random_grid(20, 20, 0.2, 0.05, rng);
    const Cell from{static_cast<int>(rng() % 20), static_cast<int>(rng() % 20)};
    const Cell to{static_cast<int>(rng() % 20), static_cast<int>(rng() % 20)};
    const Path p = plan_path(g, from, to);
    ASSERT_FALSE(p.empty());
    EXPECT_EQ(p.front(), from);
    for (std::size_t i = 1; i < p.size(); ++i) {
      EXPECT_LE(std::abs(p[i].row - p[i - 1].row), 1);
      EXPECT_LE(std::abs(p[i].col - p[i - 1].col), 1);
      EXPECT_EQ(g(p[i].row, p[i].col), Occupancy::Free);
    }
  }
}

TEST(PlanPath, EnclosedTargetEndsAtNearestReachableCell) {
  // A sealed 3x3 room in the middle of a 12x12 free grid.
  Grid<Occupancy> g = Grid<Occupancy>::Constant(12, 12, Occupancy::Free);
  for (int i = 4; i <= 8; ++i) {
    g(4, i) = g(8, i) = g(i, 4) = g(i, 8) = Occupancy::Occupied;
  }
  const Cell to{6, 6};
  const Path p = plan_path(g, {0, 0}, to);
  // Brute force: reachable cell minimising squared distance to the target,
  // lowest flat index on ties.
  const std::vector<Cell> src{{0, 0}};
  const Grid<double> reach = oracle::dijkstra(g, src, false, 0.02);
  Cell best{-1, -1};
  long best_d2 = -1;
  for (int r = 0; r < 12; ++r) {
    for (int c = 0; c < 12; ++c) {
      if (!std::isfinite(reach(r, c))) continue;
      const long d2 = long(r - to.row) * (r - to.row) + long(c - to.col) * (c - to.col);
      if (best_d2 < 0 || d2 < best_d2) {
        best_d2 = d2;
        best = {r, c};
      }
    }
  }
  EXPECT_EQ(p.back(), best);
  EXPECT_EQ(best, (Cell{3, 6}));
}

#include <gtest/gtest.h>

#include <numbers>

#include "lilis/error.hpp"
#include "lilis/partitioner.hpp"
#include "lilis/query.hpp"
#include "oracles.hpp"

using namespace lilis;

namespace {

// One partition holding every object, keyed and indexed like assign() does.
Partition single_partition(std::vector<SpatialObject> objs, const KeyStrategy& key, int eps = 4) {
  const std::vector<Rect> grids{Rect{-1e9, -1e9, 1e9, 1e9}};
  auto ds = assign(objs, grids, key, eps, 6);
  return std::move(ds.partitions[0]);
}

}  // namespace

TEST(PointSearch, FindsMatchDeepInsideDuplicateKeyRun) {
  std::vector<SpatialObject> objs;
  for (std::uint64_t i = 0; i < 50; ++i) objs.push_back({0, 1.0 + i * 0.01, 0.0, i});
  for (std::uint64_t i = 0; i < 100; ++i) objs.push_back({0, 7.0, i == 89 ? 3.25 : 100.0 + i, 100 + i});
  for (std::uint64_t i = 0; i < 50; ++i) objs.push_back({0, 8.0 + i, 0.0, 300 + i});
  const auto part = single_partition(objs, KeyStrategy::axis_x(), 2);
  EXPECT_TRUE(local_point_search(part, {7.0, 3.25}, KeyStrategy::axis_x()));
  EXPECT_FALSE(local_point_search(part, {7.0, 3.5}, KeyStrategy::axis_x()));
  EXPECT_FALSE(local_point_search(part, {7.5, 0.0}, KeyStrategy::axis_x()));
  EXPECT_TRUE(local_point_search(part, {1.0, 0.0}, KeyStrategy::axis_x()));
  EXPECT_TRUE(local_point_search(part, {57.0, 0.0}, KeyStrategy::axis_x()));
}

TEST(PointSearch, EveryStoredPointIsFound) {
  const auto data = oracle::clustered(20000, 3);
  for (const auto& key : {KeyStrategy::axis_x(), KeyStrategy::axis_y(),
                          KeyStrategy::zorder(10, {0, 0, 1, 1})}) {
    const auto part = single_partition(data, key, 8);
    for (const auto& o : part.objects) ASSERT_TRUE(local_point_search(part, o.point(), key));
  }
}

TEST(PointSearch, EmptyPartitionFindsNothing) {
  Partition empty;
  EXPECT_FALSE(local_point_search(empty, {0, 0}, KeyStrategy::axis_x()));
  EXPECT_TRUE(local_range_search(empty, {0, 0, 1, 1}, KeyStrategy::axis_x()).empty());
}

TEST(KeyInterval, Strategies) {
  const Rect q{0.1, 0.2, 0.3, 0.4};
  EXPECT_EQ(key_interval(q, KeyStrategy::axis_x()), std::make_pair(0.1, 0.3));
  EXPECT_EQ(key_interval(q, KeyStrategy::axis_y()), std::make_pair(0.2, 0.4));
  const auto z = KeyStrategy::zorder(8, {0, 0, 1, 1});
  const auto [lo, hi] = key_interval(q, z);
  EXPECT_EQ(lo, project_key(q.lo(), z));
  EXPECT_EQ(hi, project_key(q.hi(), z));
}

TEST(RangeSearch, MatchesBruteForceForEveryKey) {
  const auto data = oracle::clustered(20000, 6);
  std::mt19937_64 rng(8);
  for (const auto& key : {KeyStrategy::axis_x(), KeyStrategy::axis_y(),
                          KeyStrategy::zorder(12, {0, 0, 1, 1})}) {
    const auto part = single_partition(data, key, 16);
    for (int i = 0; i < 200; ++i) {
      const Rect q = oracle::random_rect(rng, {-0.1, -0.1, 1.0, 1.0}, 0.15);
      auto got = local_range_search(part, q, key);
      std::sort(got.begin(), got.end(), canonical_less);
      auto expected = oracle::range(part.objects, q);
      ASSERT_EQ(got, expected) << to_string(key.kind) << " query " << i;
    }
  }
}

TEST(RangeSearch, EnvelopingQueryReturnsWholePartition) {
  const auto part = single_partition(oracle::uniform(1000, 2), KeyStrategy::axis_x());
  EXPECT_EQ(local_range_search(part, {-5, -5, 5, 5}, KeyStrategy::axis_x()).size(), 1000u);
}

TEST(KnnFormulas, InitialRadius) {
  EXPECT_NEAR(knn_initial_radius(10, 1000, 100.0), 0.5641895835, 1e-9);
  EXPECT_NEAR(knn_initial_radius(1, 1, std::numbers::pi), 1.0, 1e-12);
  EXPECT_NEAR(knn_initial_radius(4, 400, std::numbers::pi), 0.1, 1e-12);
  EXPECT_THROW(knn_initial_radius(0, 10, 1.0), InvalidArgument);
  EXPECT_THROW(knn_initial_radius(1, 10, 0.0), InvalidArgument);
}

TEST(KnnFormulas, RoundBound) {
  EXPECT_EQ(knn_round_bound(10, 10000, {0, 0, 1, 1}), 13u);
  EXPECT_EQ(knn_round_bound(2, 2, {0, 0, 1, 1}), 1u);
  EXPECT_EQ(knn_round_bound(2, 100000, {0, 0, 1, 1}), 7u);
  EXPECT_EQ(knn_round_bound(5, 100000, {0, 0, 1, 1}), 13u);
  EXPECT_EQ(knn_round_bound(10, 100000, {0, 0, 1, 1}), 16u);
  EXPECT_EQ(knn_round_bound(50, 100000, {0, 0, 1, 1}), 19u);
  EXPECT_THROW(knn_round_bound(1, 100, {0, 0, 1, 1}), InvalidArgument);
  EXPECT_THROW(knn_round_bound(5, 100, {0, 0, 0, 1}), InvalidArgument);
}

TEST(KnnFormulas, GrowthFactor) {
  EXPECT_DOUBLE_EQ(knn_growth_factor(1), 2.0);
  EXPECT_DOUBLE_EQ(knn_growth_factor(1, 3.0), 3.0);
  EXPECT_NEAR(knn_growth_factor(2), 8.0 / std::numbers::pi, 1e-12);
  for (std::uint32_t k = 2; k < 1000; ++k) EXPECT_GT(knn_growth_factor(k), 1.0);
}

TEST(PointSearch, PresentPoint) {
  const auto part = single_partition({{0, 2.0, 5.0, 0}, {0, 1.0, 1.0, 1}}, KeyStrategy::axis_x());
  EXPECT_TRUE(local_point_search(part, {2.0, 5.0}, KeyStrategy::axis_x()));
}

TEST(RangeSearch, DisjointKeysGiveNothing) {
  const auto part = single_partition(oracle::uniform(1000, 2), KeyStrategy::axis_x());
  EXPECT_TRUE(local_range_search(part, {2, 0, 3, 1}, KeyStrategy::axis_x()).empty());
  EXPECT_TRUE(local_range_search(part, {-3, 0, -2, 1}, KeyStrategy::axis_x()).empty());
}

TEST(KnnFormulas, RoundBoundWhenStartRadiusIsHalfTheSide) {
  // n = 4k/pi on the unit square puts the starting radius near 0.5:
  // (ln sqrt2 - ln 0.5002) / ln(400 / 99pi) = 4.13.
  const std::uint64_t k = 100;
  const auto n = static_cast<std::uint64_t>(4.0 * k / std::numbers::pi);
  EXPECT_EQ(knn_round_bound(k, n, {0, 0, 1, 1}), 5u);
  EXPECT_EQ(knn_round_bound(2, 1, {0, 0, 1, 1}), 1u);
}

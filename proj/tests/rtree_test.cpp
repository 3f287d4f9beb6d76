#include <gtest/gtest.h>

#include <algorithm>

#include "lilis/error.hpp"
#include "lilis/rtree.hpp"
#include "oracles.hpp"

using namespace lilis;

namespace {

// Checks MBR tightness, child containment and entry coverage; returns leaf depth.
void audit(const RTree& t) {
  std::vector<int> covered(t.entries().size(), 0);
  for (const auto& n : t.nodes()) {
    ASSERT_GE(n.count, 1u);
    ASSERT_LE(n.count, t.fanout());
    Rect tight = Rect::empty();
    for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
      if (n.leaf) {
        tight.expand(t.entries()[i].point());
        ++covered[i];
      } else {
        tight.expand(t.nodes()[i].mbr);
      }
    }
    EXPECT_EQ(n.mbr, tight);
  }
  EXPECT_TRUE(std::all_of(covered.begin(), covered.end(), [](int c) { return c == 1; }));
}

}  // namespace

TEST(RTree, LatticeIntoFourLeaves) {
  std::vector<SpatialObject> objs;
  std::uint64_t id = 0;
  for (int x = 0; x < 4; ++x) {
    for (int y = 0; y < 4; ++y) objs.push_back({0.0, double(x), double(y), id++});
  }
  const auto t = RTree::bulk_load(objs, 4);
  const auto leaves = t.leaf_mbrs();
  ASSERT_EQ(leaves.size(), 4u);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    for (std::size_t j = i + 1; j < leaves.size(); ++j) {
      EXPECT_FALSE(rect_intersects(leaves[i], leaves[j]));
    }
  }
  EXPECT_EQ(t.root().mbr, (Rect{0, 0, 3, 3}));
  audit(t);
}

TEST(RTree, SelfLookupFindsEveryEntry) {
  const auto data = oracle::clustered(5000, 1);
  const auto t = RTree::bulk_load(data, 16);
  for (const auto& o : data) {
    const auto hits = t.range(Rect::around(o.point()));
    EXPECT_NE(std::find(hits.begin(), hits.end(), o), hits.end());
  }
}

TEST(RTree, StructureIsSound) {
  for (std::uint32_t f : {2u, 3u, 16u, 64u}) {
    const auto t = RTree::bulk_load(oracle::uniform(3000, f), f);
    audit(t);
    EXPECT_EQ(t.entries().size(), 3000u);
    EXPECT_GE(t.height(), 1u);
  }
}

TEST(RTree, RangeMatchesBruteForce) {
  const auto data = oracle::clustered(10000, 2);
  const auto t = RTree::bulk_load(data, 32);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 300; ++i) {
    const Rect q = oracle::random_rect(rng, {0, 0, 1, 1}, 0.2);
    ASSERT_EQ(t.range(q), oracle::range(data, q));
  }
}

TEST(RTree, SingleEntryAndErrors) {
  const auto t = RTree::bulk_load({{0.0, 1.0, 2.0, 7}});
  EXPECT_EQ(t.leaf_count(), 1u);
  EXPECT_EQ(t.root().mbr, (Rect{1, 2, 1, 2}));
  EXPECT_THROW(RTree::bulk_load({}), InvalidArgument);
  EXPECT_THROW(RTree::bulk_load({{0.0, 1.0, 2.0, 7}}, 1), InvalidArgument);
}

TEST(RTree, FourPointsMakeOneLeafRoot) {
  const auto t = RTree::bulk_load({{0, 0, 0, 0}, {0, 1, 0, 1}, {0, 0, 1, 2}, {0, 1, 1, 3}}, 4);
  EXPECT_EQ(t.nodes().size(), 1u);
  EXPECT_TRUE(t.root().leaf);
  EXPECT_EQ(t.range({-1, -1, 2, 2}).size(), 4u);
  EXPECT_TRUE(t.range({5, 5, 6, 6}).empty());
}

#pragma once

#include <cstdint>
#include <optional>
#include <tuple>
#include <vector>

#include "lilis/geometry.hpp"
#include "lilis/learned_index.hpp"

namespace lilis {

/// One indexed record. `key` is the 1-D projection used for sorting.
struct SpatialObject {
  double key = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::uint64_t payload = 0;

  Point point() const { return {x, y}; }

  friend bool operator==(const SpatialObject&, const SpatialObject&) = default;
};

/// Canonical result order: (key, x, y, payload).
inline bool canonical_less(const SpatialObject& a, const SpatialObject& b) {
  return std::tie(a.key, a.x, a.y, a.payload) < std::tie(b.key, b.x, b.y, b.payload);
}

/// Global-index entry for one partition.
struct GridDescriptor {
  std::uint32_t id = 0;
  Rect mbr = Rect::empty();
  bool overflow = false;
  std::uint64_t count = 0;

  friend bool operator==(const GridDescriptor&, const GridDescriptor&) = default;
};

struct Partition {
  GridDescriptor descriptor;
  std::vector<SpatialObject> objects;  // canonical order, hence non-decreasing key
  std::optional<SplineIndex> index;    // absent iff objects is empty

  friend bool operator==(const Partition&, const Partition&) = default;
};

struct PartitionStrategy {
  enum class Kind : std::uint8_t {
    FixedGrid = 0,
    AdaptiveGrid = 1,
    Quadtree = 2,
    KDTree = 3,
    RTreeLeaves = 4,
  };

  Kind kind = Kind::KDTree;
  std::uint32_t a = 0;  // nx | max_leaf | fanout
  std::uint32_t b = 0;  // ny (grids only)

  static PartitionStrategy fixed_grid(std::uint32_t nx, std::uint32_t ny);
  static PartitionStrategy adaptive_grid(std::uint32_t nx, std::uint32_t ny);
  static PartitionStrategy quadtree(std::uint32_t max_leaf);
  static PartitionStrategy kdtree(std::uint32_t max_leaf);
  static PartitionStrategy rtree_leaves(std::uint32_t fanout);

  friend bool operator==(const PartitionStrategy&, const PartitionStrategy&) = default;
};

const char* to_string(PartitionStrategy::Kind kind);

/// Immutable result of partitioning + per-partition indexing. The last
/// partition is always the overflow grid.
struct PartitionedDataset {
  std::vector<Partition> partitions;
  KeyStrategy key;
  PartitionStrategy strategy;
  int epsilon = SplineIndex::kDefaultEpsilon;
  int radix_bits = SplineIndex::kDefaultRadixBits;
  Rect global_mbr = Rect::empty();
  std::uint64_t total = 0;

  const Partition& overflow() const { return partitions.back(); }

  friend bool operator==(const PartitionedDataset&, const PartitionedDataset&) = default;
};

}  // namespace lilis

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lilis/dataset.hpp"

namespace lilis {

/// Static R-tree packed with Sort-Tile-Recursive bulk loading. Nodes are stored
/// flat; level 0 holds the leaves and the root is the single node of the top level.
class RTree {
 public:
  static constexpr std::uint32_t kDefaultFanout = 64;

  struct Node {
    Rect mbr = Rect::empty();
    std::uint32_t first = 0;  // into entries (leaf) or nodes (internal)
    std::uint32_t count = 0;
    bool leaf = true;
  };

  /// Throws InvalidArgument on empty input or fanout < 2. When `x_sorted` is set
  /// the input is taken to already be in (x, y, payload) order.
  static RTree bulk_load(std::vector<SpatialObject> objects,
                         std::uint32_t fanout = kDefaultFanout, bool x_sorted = false);

  /// Every entry inside the closed query rect, in canonical order.
  std::vector<SpatialObject> range(const Rect& q) const;
  /// Leaf MBRs in STR packing order.
  std::vector<Rect> leaf_mbrs() const;

  const Node& root() const { return nodes_.back(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<SpatialObject>& entries() const { return entries_; }
  std::uint32_t fanout() const { return fanout_; }
  std::size_t leaf_count() const { return leaf_count_; }
  std::size_t height() const { return height_; }

 private:
  std::vector<SpatialObject> entries_;
  std::vector<Node> nodes_;
  std::uint32_t fanout_ = kDefaultFanout;
  std::size_t leaf_count_ = 0;
  std::size_t height_ = 0;
};

}  // namespace lilis

#include "lilis/rtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "lilis/error.hpp"

namespace lilis {

namespace {

bool x_order(const SpatialObject& a, const SpatialObject& b) {
  return std::tie(a.x, a.y, a.payload) < std::tie(b.x, b.y, b.payload);
}

bool y_order(const SpatialObject& a, const SpatialObject& b) {
  return std::tie(a.y, a.x, a.payload) < std::tie(b.y, b.x, b.payload);
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

std::size_t slab_count(std::size_t n, std::size_t fanout) {
  const std::size_t pages = ceil_div(n, fanout);
  return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(pages))));
}

}  // namespace

RTree RTree::bulk_load(std::vector<SpatialObject> objects, std::uint32_t fanout,
                       bool x_sorted) {
  if (objects.empty()) throw InvalidArgument("cannot bulk-load an empty R-tree");
  if (fanout < 2) throw InvalidArgument("R-tree fanout must be >= 2");

  RTree tree;
  tree.fanout_ = fanout;
  tree.entries_ = std::move(objects);
  auto& entries = tree.entries_;
  const std::size_t n = entries.size();

  if (!x_sorted) std::sort(entries.begin(), entries.end(), x_order);
  const std::size_t slab = slab_count(n, fanout) * fanout;

  std::vector<Node> level;
  level.reserve(ceil_div(n, fanout));
  for (std::size_t s = 0; s < n; s += slab) {
    const std::size_t s_end = std::min(n, s + slab);
    std::sort(entries.begin() + s, entries.begin() + s_end, y_order);
    for (std::size_t i = s; i < s_end; i += fanout) {
      Node leaf;
      leaf.first = static_cast<std::uint32_t>(i);
      leaf.count = static_cast<std::uint32_t>(std::min<std::size_t>(fanout, s_end - i));
      for (std::size_t e = i; e < i + leaf.count; ++e) leaf.mbr.expand(entries[e].point());
      level.push_back(leaf);
    }
  }
  tree.leaf_count_ = level.size();
  tree.height_ = 1;

  // Pack each level into parents by STR over the node centers until one node remains.
  while (level.size() > 1) {
    const std::size_t m = level.size();
    auto cx = [&](std::size_t i) { return 0.5 * (level[i].mbr.x_lo + level[i].mbr.x_hi); };
    auto cy = [&](std::size_t i) { return 0.5 * (level[i].mbr.y_lo + level[i].mbr.y_hi); };

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::make_tuple(cx(a), cy(a), a) < std::make_tuple(cx(b), cy(b), b);
    });
    const std::size_t node_slab = slab_count(m, fanout) * fanout;
    for (std::size_t s = 0; s < m; s += node_slab) {
      const std::size_t s_end = std::min(m, s + node_slab);
      std::sort(order.begin() + s, order.begin() + s_end, [&](std::size_t a, std::size_t b) {
        return std::make_tuple(cy(a), cx(a), a) < std::make_tuple(cy(b), cx(b), b);
      });
    }

    const auto offset = static_cast<std::uint32_t>(tree.nodes_.size());
    for (std::size_t i : order) tree.nodes_.push_back(level[i]);

    std::vector<Node> parents;
    parents.reserve(ceil_div(m, fanout));
    for (std::size_t s = 0; s < m; s += node_slab) {
      const std::size_t s_end = std::min(m, s + node_slab);
      for (std::size_t i = s; i < s_end; i += fanout) {
        Node parent;
        parent.leaf = false;
        parent.first = offset + static_cast<std::uint32_t>(i);
        parent.count = static_cast<std::uint32_t>(std::min<std::size_t>(fanout, s_end - i));
        for (std::size_t c = 0; c < parent.count; ++c) {
          parent.mbr.expand(tree.nodes_[parent.first + c].mbr);
        }
        parents.push_back(parent);
      }
    }
    level = std::move(parents);
    ++tree.height_;
  }
  tree.nodes_.push_back(level.front());
  return tree;
}

std::vector<SpatialObject> RTree::range(const Rect& q) const {
  std::vector<SpatialObject> out;
  std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(nodes_.size() - 1)};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (!rect_intersects(node.mbr, q)) continue;
    if (node.leaf) {
      const bool all = rect_envelops(q, node.mbr);
      for (std::uint32_t e = node.first; e < node.first + node.count; ++e) {
        if (all || rect_contains_point(q, entries_[e].point())) out.push_back(entries_[e]);
      }
    } else {
      for (std::uint32_t c = node.first; c < node.first + node.count; ++c) stack.push_back(c);
    }
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

std::vector<Rect> RTree::leaf_mbrs() const {
  // Leaves are listed in packing order (x-slab, then y) ordered by their entry ranges.
  std::vector<const Node*> leaves;
  leaves.reserve(leaf_count_);
  for (const Node& node : nodes_) {
    if (node.leaf) leaves.push_back(&node);
  }
  std::sort(leaves.begin(), leaves.end(),
            [](const Node* a, const Node* b) { return a->first < b->first; });
  std::vector<Rect> out;
  out.reserve(leaves.size());
  for (const Node* leaf : leaves) out.push_back(leaf->mbr);
  return out;
}

}  // namespace lilis

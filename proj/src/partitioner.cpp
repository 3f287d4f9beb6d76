#include "lilis/partitioner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <tuple>

#include <tbb/parallel_for.h>

#include "lilis/error.hpp"
#include "lilis/rtree.hpp"

namespace lilis {

PartitionStrategy PartitionStrategy::fixed_grid(std::uint32_t nx, std::uint32_t ny) {
  if (nx < 1 || ny < 1) throw InvalidArgument("fixed grid needs nx, ny >= 1");
  return {Kind::FixedGrid, nx, ny};
}

PartitionStrategy PartitionStrategy::adaptive_grid(std::uint32_t nx, std::uint32_t ny) {
  if (nx < 1 || ny < 1) throw InvalidArgument("adaptive grid needs nx, ny >= 1");
  return {Kind::AdaptiveGrid, nx, ny};
}

PartitionStrategy PartitionStrategy::quadtree(std::uint32_t max_leaf) {
  if (max_leaf < 1) throw InvalidArgument("quadtree max_leaf must be >= 1");
  return {Kind::Quadtree, max_leaf, 0};
}

PartitionStrategy PartitionStrategy::kdtree(std::uint32_t max_leaf) {
  if (max_leaf < 1) throw InvalidArgument("kd-tree max_leaf must be >= 1");
  return {Kind::KDTree, max_leaf, 0};
}

PartitionStrategy PartitionStrategy::rtree_leaves(std::uint32_t fanout) {
  if (fanout < 2) throw InvalidArgument("R-tree fanout must be >= 2");
  return {Kind::RTreeLeaves, fanout, 0};
}

const char* to_string(PartitionStrategy::Kind kind) {
  switch (kind) {
    case PartitionStrategy::Kind::FixedGrid: return "fixed";
    case PartitionStrategy::Kind::AdaptiveGrid: return "adaptive";
    case PartitionStrategy::Kind::Quadtree: return "quadtree";
    case PartitionStrategy::Kind::KDTree: return "kdtree";
    case PartitionStrategy::Kind::RTreeLeaves: return "rtree";
  }
  return "?";
}

std::vector<Point> sample(std::span<const SpatialObject> objects, double rate,
                          std::uint64_t seed) {
  if (objects.empty()) throw InvalidArgument("cannot sample an empty dataset");
  if (!(rate > 0.0 && rate <= 1.0)) throw InvalidArgument("sample rate must be in (0, 1]");
  std::vector<Point> out;
  if (rate == 1.0) {
    out.reserve(objects.size());
    for (const auto& o : objects) out.push_back(o.point());
    return out;
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(rate);
  for (const auto& o : objects) {
    if (keep(rng)) out.push_back(o.point());
  }
  if (out.empty()) {
    const std::size_t n = std::min<std::size_t>(1000, objects.size());
    for (std::size_t i = 0; i < n; ++i) out.push_back(objects[i].point());
  }
  return out;
}

namespace {

std::vector<Rect> fixed_cells(std::span<const double> xs,
                              std::span<const double> ys) {
  std::vector<Rect> cells;
  cells.reserve((xs.size() - 1) * (ys.size() - 1));
  for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      cells.push_back({xs[i], ys[j], xs[i + 1], ys[j + 1]});
    }
  }
  return cells;
}

std::vector<double> uniform_edges(double lo, double hi, std::uint32_t n) {
  std::vector<double> edges(n + 1);
  for (std::uint32_t i = 0; i <= n; ++i) edges[i] = lo + (hi - lo) * i / n;
  edges.back() = hi;
  return edges;
}

std::vector<double> quantile_edges(std::vector<double> values, std::uint32_t n) {
  std::sort(values.begin(), values.end());
  std::vector<double> edges(n + 1);
  edges.front() = values.front();
  edges.back() = values.back();
  for (std::uint32_t i = 1; i < n; ++i) edges[i] = values[i * values.size() / n];
  return edges;
}

void quadtree_split(std::vector<Point> pts, const Rect& box, std::uint32_t max_leaf, int depth,
                    std::vector<Rect>& out) {
  constexpr int kMaxDepth = 24;
  const bool all_same = std::all_of(pts.begin(), pts.end(),
                                    [&](const Point& p) { return p == pts.front(); });
  if (pts.size() <= max_leaf || depth >= kMaxDepth || all_same) {
    out.push_back(box);
    return;
  }
  const double cx = 0.5 * (box.x_lo + box.x_hi);
  const double cy = 0.5 * (box.y_lo + box.y_hi);
  const Rect quads[4] = {
      {box.x_lo, box.y_lo, cx, cy},
      {cx, box.y_lo, box.x_hi, cy},
      {box.x_lo, cy, cx, box.y_hi},
      {cx, cy, box.x_hi, box.y_hi},
  };
  std::vector<Point> parts[4];
  for (const Point& p : pts) {
    for (int q = 0; q < 4; ++q) {
      if (rect_contains_point(quads[q], p)) {
        parts[q].push_back(p);
        break;
      }
    }
  }
  pts.clear();
  pts.shrink_to_fit();
  for (int q = 0; q < 4; ++q) quadtree_split(std::move(parts[q]), quads[q], max_leaf, depth + 1, out);
}

// Median split on alternating axes; the split coordinate sits halfway between the
// two middle points so distinct coordinates are strictly separated.
void kdtree_split(std::span<Point> pts, const Rect& box, std::uint32_t max_leaf, int depth,
                  std::vector<Rect>& out) {
  if (pts.size() <= max_leaf) {
    out.push_back(box);
    return;
  }
  const std::size_t mid = pts.size() / 2;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const bool along_x = ((depth + attempt) % 2) == 0;
    auto coord = [along_x](const Point& p) { return along_x ? p.x : p.y; };
    std::sort(pts.begin(), pts.end(), [&](const Point& a, const Point& b) {
      return along_x ? std::tie(a.x, a.y) < std::tie(b.x, b.y)
                     : std::tie(a.y, a.x) < std::tie(b.y, b.x);
    });
    const double left = coord(pts[mid - 1]);
    const double right = coord(pts[mid]);
    if (left == right) continue;
    const double split = 0.5 * (left + right);
    Rect lo_box = box;
    Rect hi_box = box;
    if (along_x) {
      lo_box.x_hi = split;
      hi_box.x_lo = split;
    } else {
      lo_box.y_hi = split;
      hi_box.y_lo = split;
    }
    kdtree_split(pts.first(mid), lo_box, max_leaf, depth + 1, out);
    kdtree_split(pts.subspan(mid), hi_box, max_leaf, depth + 1, out);
    return;
  }
  // Middle points coincide on both axes; keep as one leaf.
  out.push_back(box);
}

}  // namespace

std::vector<Rect> build_grids(std::span<const Point> sample, const PartitionStrategy& strategy) {
  if (sample.empty()) throw InvalidArgument("cannot build grids from an empty sample");
  const Rect box = points_mbr(sample);
  std::vector<Rect> grids;
  switch (strategy.kind) {
    case PartitionStrategy::Kind::FixedGrid: {
      const auto xs = uniform_edges(box.x_lo, box.x_hi, strategy.a);
      const auto ys = uniform_edges(box.y_lo, box.y_hi, strategy.b);
      grids = fixed_cells(xs, ys);
      break;
    }
    case PartitionStrategy::Kind::AdaptiveGrid: {
      std::vector<double> xv, yv;
      xv.reserve(sample.size());
      yv.reserve(sample.size());
      for (const Point& p : sample) {
        xv.push_back(p.x);
        yv.push_back(p.y);
      }
      const auto xs = quantile_edges(std::move(xv), strategy.a);
      const auto ys = quantile_edges(std::move(yv), strategy.b);
      grids = fixed_cells(xs, ys);
      break;
    }
    case PartitionStrategy::Kind::Quadtree:
      quadtree_split({sample.begin(), sample.end()}, box, strategy.a, 0, grids);
      break;
    case PartitionStrategy::Kind::KDTree: {
      std::vector<Point> pts(sample.begin(), sample.end());
      kdtree_split(pts, box, strategy.a, 0, grids);
      break;
    }
    case PartitionStrategy::Kind::RTreeLeaves: {
      std::vector<SpatialObject> objs;
      objs.reserve(sample.size());
      for (std::size_t i = 0; i < sample.size(); ++i) {
        objs.push_back({0.0, sample[i].x, sample[i].y, i});
      }
      grids = RTree::bulk_load(std::move(objs), strategy.a).leaf_mbrs();
      break;
    }
  }
  return grids;
}

std::vector<Rect> stretch_to_cover(std::vector<Rect> grids, const Rect& from, const Rect& to) {
  for (Rect& r : grids) {
    if (r.x_lo == from.x_lo) r.x_lo = std::min(r.x_lo, to.x_lo);
    if (r.y_lo == from.y_lo) r.y_lo = std::min(r.y_lo, to.y_lo);
    if (r.x_hi == from.x_hi) r.x_hi = std::max(r.x_hi, to.x_hi);
    if (r.y_hi == from.y_hi) r.y_hi = std::max(r.y_hi, to.y_hi);
  }
  return grids;
}

namespace {

// Bucket grid over the union of the grid rects. Each bucket lists, in id order,
// the grids that may contain a point of that bucket, so a bucket scan returns the
// same first match as a scan over the full list.
class GridLocator {
 public:
  explicit GridLocator(std::span<const Rect> grids) : grids_(grids) {
    for (const Rect& g : grids) bounds_.expand(g);
    const auto side = static_cast<std::size_t>(std::ceil(2.0 * std::sqrt(grids.size())));
    nx_ = std::clamp<std::size_t>(side, 1, 256);
    ny_ = nx_;
    buckets_.resize(nx_ * ny_);
    for (std::size_t id = 0; id < grids.size(); ++id) {
      const Rect& g = grids[id];
      if (g.is_empty()) continue;
      const std::size_t i0 = bx(g.x_lo), i1 = bx(g.x_hi);
      const std::size_t j0 = by(g.y_lo), j1 = by(g.y_hi);
      for (std::size_t j = j0; j <= j1; ++j) {
        for (std::size_t i = i0; i <= i1; ++i) {
          buckets_[j * nx_ + i].push_back(static_cast<std::uint32_t>(id));
        }
      }
    }
  }

  std::uint32_t find(Point p) const {
    const auto none = static_cast<std::uint32_t>(grids_.size());
    if (!rect_contains_point(bounds_, p)) return none;
    for (std::uint32_t id : buckets_[by(p.y) * nx_ + bx(p.x)]) {
      if (rect_contains_point(grids_[id], p)) return id;
    }
    return none;
  }

 private:
  static std::size_t bucket(double v, double lo, double hi, std::size_t n) {
    if (!(hi > lo)) return 0;
    const double t = (v - lo) / (hi - lo) * static_cast<double>(n);
    if (!(t > 0.0)) return 0;
    return std::min(n - 1, static_cast<std::size_t>(t));
  }
  std::size_t bx(double x) const { return bucket(x, bounds_.x_lo, bounds_.x_hi, nx_); }
  std::size_t by(double y) const { return bucket(y, bounds_.y_lo, bounds_.y_hi, ny_); }

  std::span<const Rect> grids_;
  Rect bounds_ = Rect::empty();
  std::size_t nx_ = 1;
  std::size_t ny_ = 1;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

}  // namespace

std::vector<std::uint32_t> locate(std::span<const SpatialObject> objects,
                                  std::span<const Rect> grids) {
  const GridLocator locator(grids);
  std::vector<std::uint32_t> ids(objects.size());
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, objects.size(), 1 << 14),
                    [&](const tbb::blocked_range<std::size_t>& r) {
                      for (std::size_t i = r.begin(); i != r.end(); ++i) {
                        ids[i] = locator.find(objects[i].point());
                      }
                    });
  return ids;
}

PartitionedDataset assign(std::span<const SpatialObject> objects, std::span<const Rect> grids,
                          const KeyStrategy& key, int epsilon, int radix_bits) {
  if (grids.empty()) throw InvalidArgument("assignment needs at least one grid");
  const std::size_t n_parts = grids.size() + 1;
  const auto ids = locate(objects, grids);

  PartitionedDataset ds;
  ds.key = key;
  ds.epsilon = epsilon;
  ds.radix_bits = radix_bits;
  ds.total = objects.size();
  ds.partitions.resize(n_parts);

  std::vector<std::size_t> counts(n_parts, 0);
  for (std::uint32_t id : ids) ++counts[id];
  for (std::size_t p = 0; p < n_parts; ++p) {
    auto& part = ds.partitions[p];
    part.descriptor.id = static_cast<std::uint32_t>(p);
    part.descriptor.overflow = (p + 1 == n_parts);
    part.descriptor.count = counts[p];
    part.objects.reserve(counts[p]);
  }
  for (std::size_t i = 0; i < objects.size(); ++i) {
    SpatialObject o = objects[i];
    o.key = project_key(o.point(), key);
    ds.partitions[ids[i]].objects.push_back(o);
    ds.global_mbr.expand(o.point());
  }

  tbb::parallel_for(std::size_t{0}, n_parts, [&](std::size_t p) {
    auto& part = ds.partitions[p];
    if (part.objects.empty()) return;
    std::sort(part.objects.begin(), part.objects.end(), canonical_less);
    std::vector<double> keys(part.objects.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
      keys[i] = part.objects[i].key;
      part.descriptor.mbr.expand(part.objects[i].point());
    }
    part.index = SplineIndex::build(keys, epsilon, radix_bits);
  });
  return ds;
}

PartitionStrategy default_strategy(std::size_t sample_size, std::uint32_t workers) {
  const std::size_t target = 2 * std::max<std::uint32_t>(1, workers);
  const auto max_leaf = static_cast<std::uint32_t>(
      std::max<std::size_t>(1, (sample_size + target - 1) / target));
  return PartitionStrategy::kdtree(max_leaf);
}

Rect zorder_domain_for(const Rect& mbr) {
  if (mbr.is_empty()) return {0.0, 0.0, 1.0, 1.0};
  Rect d = mbr;
  if (!(d.width() > 0.0)) {
    d.x_lo -= 0.5;
    d.x_hi += 0.5;
  }
  if (!(d.height() > 0.0)) {
    d.y_lo -= 0.5;
    d.y_hi += 0.5;
  }
  return d;
}

PartitionedDataset build_dataset(std::span<const SpatialObject> objects,
                                 const BuildOptions& options) {
  if (objects.empty()) throw InvalidArgument("cannot build a dataset from no objects");
  Rect data_mbr = Rect::empty();
  for (const auto& o : objects) {
    if (!is_finite(o.point())) throw InvalidArgument("dataset contains a non-finite point");
    data_mbr.expand(o.point());
  }

  KeyStrategy key = options.key;
  if (key.kind == KeyStrategy::Kind::ZOrder && key.domain.area() <= 0.0) {
    key = KeyStrategy::zorder(key.bits_per_dim, zorder_domain_for(data_mbr));
  }

  const auto pts = sample(objects, options.sample_rate, options.seed);
  const PartitionStrategy strategy =
      options.strategy ? *options.strategy : default_strategy(pts.size(), options.workers);

  auto grids = build_grids(pts, strategy);
  if (strategy.kind != PartitionStrategy::Kind::RTreeLeaves) {
    grids = stretch_to_cover(std::move(grids), points_mbr(pts), data_mbr);
  }
  PartitionedDataset ds = assign(objects, grids, key, options.epsilon, options.radix_bits);
  ds.strategy = strategy;
  return ds;
}

}  // namespace lilis

#include "lilis/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include <tbb/info.h>
#include <tbb/parallel_for.h>

#include "lilis/error.hpp"
#include "lilis/partitioner.hpp"

namespace lilis {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

Rect square_window(Point c, double half) { return {c.x - half, c.y - half, c.x + half, c.y + half}; }

// Half-width at which a square window centered on q covers all of `mbr`.
double covering_radius(Point q, const Rect& mbr) {
  return std::max({std::abs(q.x - mbr.x_lo), std::abs(q.x - mbr.x_hi), std::abs(q.y - mbr.y_lo),
                   std::abs(q.y - mbr.y_hi)});
}

}  // namespace

std::vector<std::uint32_t> global_filter(std::span<const GridDescriptor> descriptors,
                                         const Rect& window) {
  std::vector<std::uint32_t> ids;
  for (const auto& d : descriptors) {
    if (d.count > 0 && rect_intersects(d.mbr, window)) ids.push_back(d.id);
  }
  return ids;
}

std::vector<std::uint32_t> global_filter(std::span<const GridDescriptor> descriptors,
                                         const QuerySpec& q, const Rect& data_mbr,
                                         std::uint64_t total) {
  return std::visit(
      Overloaded{
          [&](const PointQuery& pq) {
            std::vector<std::uint32_t> ids;
            for (const auto& d : descriptors) {
              if (d.count > 0 && rect_contains_point(d.mbr, pq.point)) ids.push_back(d.id);
            }
            return ids;
          },
          [&](const RangeQuery& rq) { return global_filter(descriptors, rq.rect); },
          [&](const CircleQuery& cq) { return global_filter(descriptors, circle_mbr(cq.circle)); },
          [&](const KnnQuery& kq) {
            const double area = data_mbr.area();
            const double r = area > 0.0
                                 ? knn_initial_radius(kq.params.k, std::max<std::uint64_t>(total, 1), area)
                                 : 0.5 * std::hypot(zorder_domain_for(data_mbr).width(),
                                                    zorder_domain_for(data_mbr).height());
            return global_filter(descriptors, square_window(kq.point, r));
          },
          [&](const JoinQuery& jq) {
            std::vector<std::uint32_t> ids;
            for (const auto& d : descriptors) {
              if (d.count == 0) continue;
              const bool hit = std::any_of(jq.polygons.begin(), jq.polygons.end(), [&](const Polygon& pg) {
                return rect_intersects(d.mbr, polygon_mbr(pg));
              });
              if (hit) ids.push_back(d.id);
            }
            return ids;
          },
      },
      q);
}

Engine::Engine(PartitionedDataset dataset, std::uint32_t workers)
    : dataset_(std::move(dataset)), workers_(workers) {
  if (workers_ < 1) throw InvalidArgument("engine needs at least one worker");
  if (dataset_.partitions.empty()) throw InvalidArgument("engine needs a partitioned dataset");
  descriptors_.reserve(dataset_.partitions.size());
  for (const auto& p : dataset_.partitions) descriptors_.push_back(p.descriptor);
  // Never ask TBB for more threads than the machine offers; results do not depend on it.
  const int threads = std::min(static_cast<int>(workers_), tbb::info::default_concurrency());
  arena_ = std::make_unique<tbb::task_arena>(std::max(threads, 1));
}

Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

template <class Task>
void Engine::dispatch(std::size_t n, Task&& task) const {
  if (workers_ == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  arena_->execute([&] {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n, 1),
                      [&](const tbb::blocked_range<std::size_t>& r) {
                        for (std::size_t i = r.begin(); i != r.end(); ++i) task(i);
                      });
  });
}

bool Engine::point_query(Point p) const {
  const auto ids = global_filter(descriptors_, PointQuery{p}, dataset_.global_mbr, dataset_.total);
  std::vector<char> hits(ids.size(), 0);
  dispatch(ids.size(), [&](std::size_t i) {
    hits[i] = local_point_search(dataset_.partitions[ids[i]], p, dataset_.key) ? 1 : 0;
  });
  return std::any_of(hits.begin(), hits.end(), [](char h) { return h != 0; });
}

std::vector<SpatialObject> Engine::range_query(const Rect& q) const {
  const auto ids = global_filter(descriptors_, q);
  std::vector<std::vector<SpatialObject>> parts(ids.size());
  dispatch(ids.size(), [&](std::size_t i) {
    local_range_search(dataset_.partitions[ids[i]], q, dataset_.key, parts[i]);
  });
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<SpatialObject> out;
  out.reserve(total);
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

std::vector<SpatialObject> Engine::circle_query(const Circle& c) const {
  if (!(c.radius >= 0.0)) throw InvalidArgument("circle radius must be >= 0");
  auto candidates = range_query(circle_mbr(c));
  std::erase_if(candidates,
                [&](const SpatialObject& o) { return distance(c.center, o.point()) > c.radius; });
  return candidates;
}

double Engine::knn_start_radius(std::uint32_t k) const {
  const Rect& mbr = dataset_.global_mbr;
  const double area = mbr.area();
  if (area > 0.0) return knn_initial_radius(k, dataset_.total, area);
  const Rect padded = zorder_domain_for(mbr);
  return 0.5 * std::hypot(padded.width(), padded.height());
}

Engine::KnnResult Engine::knn_query(Point q, const KnnParams& params) const {
  const std::uint32_t k = params.k;
  if (k < 1) throw InvalidArgument("knn needs k >= 1");
  if (k > dataset_.total) throw InvalidArgument("knn k exceeds the dataset size");
  if (params.max_rounds < 1) throw InvalidArgument("knn max_rounds must be >= 1");
  if (!is_finite(q)) throw InvalidArgument("knn query point must be finite");

  const double growth = knn_growth_factor(k, params.growth_k1);
  double r = knn_start_radius(k);
  KnnResult result;

  struct Candidate {
    double dist;
    SpatialObject obj;
  };
  auto by_distance = [](const Candidate& a, const Candidate& b) {
    return std::tie(a.dist, a.obj.key, a.obj.x, a.obj.y, a.obj.payload) <
           std::tie(b.dist, b.obj.key, b.obj.x, b.obj.y, b.obj.payload);
  };
  auto score = [&](const std::vector<SpatialObject>& objs) {
    std::vector<Candidate> c;
    c.reserve(objs.size());
    for (const auto& o : objs) c.push_back({distance(q, o.point()), o});
    return c;
  };

  for (;;) {
    if (result.rounds + 1 >= params.max_rounds) {
      r = std::max(r, covering_radius(q, dataset_.global_mbr));
    }
    auto objs = range_query(square_window(q, r));
    ++result.rounds;
    if (objs.size() < k) {
      r *= growth;
      continue;
    }
    auto cands = score(objs);
    std::nth_element(cands.begin(), cands.begin() + (k - 1), cands.end(), by_distance);
    const double dk = cands[k - 1].dist;
    if (dk > r) {
      // The square window can miss neighbors in the corner gap beyond r.
      cands = score(range_query(square_window(q, dk)));
      ++result.rounds;
    }
    std::partial_sort(cands.begin(), cands.begin() + k, cands.end(), by_distance);
    result.objects.reserve(k);
    result.distances.reserve(k);
    for (std::uint32_t i = 0; i < k; ++i) {
      result.objects.push_back(cands[i].obj);
      result.distances.push_back(cands[i].dist);
    }
    return result;
  }
}

std::vector<JoinPair> Engine::spatial_join(std::span<const Polygon> polygons) const {
  if (polygons.empty()) throw InvalidArgument("join needs at least one polygon");
  std::vector<Rect> mbrs;
  mbrs.reserve(polygons.size());
  for (const auto& pg : polygons) {
    if (pg.vertices.size() < 3) throw InvalidArgument("join polygon needs >= 3 vertices");
    mbrs.push_back(polygon_mbr(pg));
  }

  std::vector<std::uint32_t> ids;
  for (const auto& d : descriptors_) {
    if (d.count == 0) continue;
    if (std::any_of(mbrs.begin(), mbrs.end(), [&](const Rect& m) { return rect_intersects(d.mbr, m); })) {
      ids.push_back(d.id);
    }
  }

  struct Hit {
    std::size_t polygon;
    SpatialObject obj;
  };
  std::vector<std::vector<Hit>> parts(ids.size());
  dispatch(ids.size(), [&](std::size_t i) {
    const Partition& part = dataset_.partitions[ids[i]];
    std::vector<SpatialObject> cands;
    for (std::size_t g = 0; g < polygons.size(); ++g) {
      if (!rect_intersects(part.descriptor.mbr, mbrs[g])) continue;
      cands.clear();
      local_range_search(part, mbrs[g], dataset_.key, cands);
      for (const auto& o : cands) {
        if (point_in_polygon(polygons[g], o.point())) parts[i].push_back({g, o});
      }
    }
  });

  std::vector<Hit> hits;
  for (auto& p : parts) hits.insert(hits.end(), p.begin(), p.end());
  std::sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
    const auto& ia = polygons[a.polygon].id;
    const auto& ib = polygons[b.polygon].id;
    if (ia != ib) return ia < ib;
    if (a.polygon != b.polygon) return a.polygon < b.polygon;
    return canonical_less(a.obj, b.obj);
  });
  std::vector<JoinPair> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back({polygons[h.polygon].id, h.obj});
  return out;
}

ResultSet Engine::execute(const QuerySpec& q) const {
  ResultSet rs;
  std::visit(Overloaded{
                 [&](const PointQuery& pq) { rs.found = point_query(pq.point); },
                 [&](const RangeQuery& rq) { rs.objects = range_query(rq.rect); },
                 [&](const CircleQuery& cq) { rs.objects = circle_query(cq.circle); },
                 [&](const KnnQuery& kq) {
                   auto res = knn_query(kq.point, kq.params);
                   rs.objects = std::move(res.objects);
                   rs.distances = std::move(res.distances);
                   rs.rounds = res.rounds;
                 },
                 [&](const JoinQuery& jq) { rs.pairs = spatial_join(jq.polygons); },
             },
             q);
  return rs;
}

}  // namespace lilis

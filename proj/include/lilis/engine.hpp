#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include <tbb/task_arena.h>

#include "lilis/dataset.hpp"
#include "lilis/query.hpp"

namespace lilis {

struct PointQuery {
  Point point;
};
struct RangeQuery {
  Rect rect;
};
struct CircleQuery {
  Circle circle;
};
struct KnnQuery {
  Point point;
  KnnParams params;
};
struct JoinQuery {
  std::vector<Polygon> polygons;
};

using QuerySpec = std::variant<PointQuery, RangeQuery, CircleQuery, KnnQuery, JoinQuery>;

/// Merged, canonically ordered query output. Only the fields relevant to the
/// query kind are populated.
struct ResultSet {
  bool found = false;                  // point
  std::vector<SpatialObject> objects;  // range, circle, knn
  std::vector<double> distances;       // knn, parallel to objects
  std::vector<JoinPair> pairs;         // join
  std::uint32_t rounds = 0;            // knn window rounds

  friend bool operator==(const ResultSet&, const ResultSet&) = default;
};

/// Ids of every non-empty partition whose MBR can hold a result of `q`. For kNN
/// the initial square window is used.
std::vector<std::uint32_t> global_filter(std::span<const GridDescriptor> descriptors,
                                         const Rect& window);
std::vector<std::uint32_t> global_filter(std::span<const GridDescriptor> descriptors,
                                         const QuerySpec& q, const Rect& data_mbr,
                                         std::uint64_t total);

/// Two-phase executor over an immutable PartitionedDataset: a coordinator-side
/// global filter, concurrent per-partition local search, then a canonical merge.
/// All query methods are const and safe to call from many threads.
class Engine {
 public:
  static constexpr std::uint32_t kDefaultWorkers = 8;

  explicit Engine(PartitionedDataset dataset, std::uint32_t workers = kDefaultWorkers);
  ~Engine();
  Engine(Engine&&) noexcept;
  Engine& operator=(Engine&&) noexcept;

  ResultSet execute(const QuerySpec& q) const;

  bool point_query(Point p) const;
  std::vector<SpatialObject> range_query(const Rect& q) const;
  std::vector<SpatialObject> circle_query(const Circle& c) const;

  struct KnnResult {
    std::vector<SpatialObject> objects;
    std::vector<double> distances;
    std::uint32_t rounds = 0;
  };
  KnnResult knn_query(Point q, const KnnParams& params) const;

  /// Polygons are broadcast to every candidate partition; output is ordered by
  /// (polygon_id, input position, canonical object order).
  std::vector<JoinPair> spatial_join(std::span<const Polygon> polygons) const;

  /// Starting half-width of the kNN window.
  double knn_start_radius(std::uint32_t k) const;

  const PartitionedDataset& dataset() const { return dataset_; }
  const std::vector<GridDescriptor>& descriptors() const { return descriptors_; }
  std::uint32_t workers() const { return workers_; }

 private:
  template <class Task>
  void dispatch(std::size_t n, Task&& task) const;

  PartitionedDataset dataset_;
  std::vector<GridDescriptor> descriptors_;
  std::uint32_t workers_ = kDefaultWorkers;
  std::unique_ptr<tbb::task_arena> arena_;
};

}  // namespace lilis

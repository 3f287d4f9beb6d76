#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lilis/dataset.hpp"

namespace lilis {

struct KnnParams {
  std::uint32_t k = 10;
  std::uint32_t max_rounds = 64;  // the final round widens the window to the whole data MBR
  double growth_k1 = 2.0;         // radius multiplier when k == 1
};

struct JoinPair {
  std::string polygon_id;
  SpatialObject object;

  friend bool operator==(const JoinPair&, const JoinPair&) = default;
};

/// Key interval [first, second] that holds every object inside `q`.
std::pair<double, double> key_interval(const Rect& q, const KeyStrategy& key);

/// Learned exact-match lookup inside one partition.
bool local_point_search(const Partition& partition, Point q, const KeyStrategy& key);

/// Appends the partition's objects inside `q` to `out`, in partition order.
void local_range_search(const Partition& partition, const Rect& q, const KeyStrategy& key,
                        std::vector<SpatialObject>& out);
std::vector<SpatialObject> local_range_search(const Partition& partition, const Rect& q,
                                              const KeyStrategy& key);

/// Radius of a circle expected to hold k of n uniformly spread objects over `area`.
double knn_initial_radius(std::uint64_t k, std::uint64_t n, double area);

/// Upper bound on window rounds for k >= 2 on data spread over `data_mbr`.
std::uint32_t knn_round_bound(std::uint64_t k, std::uint64_t n, const Rect& data_mbr);

/// Radius multiplier applied after a round that returned fewer than k objects.
double knn_growth_factor(std::uint32_t k, double growth_k1 = 2.0);

}  // namespace lilis

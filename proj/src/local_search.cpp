#include "lilis/query.hpp"

#include <cmath>
#include <numbers>

#include "lilis/error.hpp"

namespace lilis {

std::pair<double, double> key_interval(const Rect& q, const KeyStrategy& key) {
  switch (key.kind) {
    case KeyStrategy::Kind::AxisX: return {q.x_lo, q.x_hi};
    case KeyStrategy::Kind::AxisY: return {q.y_lo, q.y_hi};
    case KeyStrategy::Kind::ZOrder:
      return {project_key(q.lo(), key), project_key(q.hi(), key)};
  }
  return {q.x_lo, q.x_hi};
}

bool local_point_search(const Partition& partition, Point q, const KeyStrategy& key) {
  const auto& objs = partition.objects;
  if (objs.empty() || !partition.index) return false;
  const double k = project_key(q, key);
  const Prediction pred = partition.index->predict(k);

  auto key_at = [&objs](std::size_t i) { return objs[i].key; };
  const std::size_t pos = lower_bound_between(pred.lo, pred.hi + 1, k, key_at);
  if (pos > pred.hi || objs[pos].key != k) return false;

  for (std::size_t p = pos; p < objs.size() && objs[p].key == k; ++p) {
    if (objs[p].x == q.x && objs[p].y == q.y) return true;
  }
  for (std::size_t p = pos; p-- > 0 && objs[p].key == k;) {
    if (objs[p].x == q.x && objs[p].y == q.y) return true;
  }
  return false;
}

void local_range_search(const Partition& partition, const Rect& q, const KeyStrategy& key,
                        std::vector<SpatialObject>& out) {
  const auto& objs = partition.objects;
  if (objs.empty() || !partition.index) return;
  if (rect_envelops(q, partition.descriptor.mbr)) {
    out.insert(out.end(), objs.begin(), objs.end());
    return;
  }
  const auto [k_lo, k_hi] = key_interval(q, key);
  const Prediction pred = partition.index->predict(k_lo);
  const std::size_t start = lower_bound_near(objs.size(), k_lo, pred.lo, pred.hi,
                                             [&objs](std::size_t i) { return objs[i].key; });
  for (std::size_t i = start; i < objs.size() && objs[i].key <= k_hi; ++i) {
    if (rect_contains_point(q, objs[i].point())) out.push_back(objs[i]);
  }
}

std::vector<SpatialObject> local_range_search(const Partition& partition, const Rect& q,
                                              const KeyStrategy& key) {
  std::vector<SpatialObject> out;
  local_range_search(partition, q, key, out);
  return out;
}

double knn_initial_radius(std::uint64_t k, std::uint64_t n, double area) {
  if (k < 1 || n < 1) throw InvalidArgument("knn radius needs k >= 1 and n >= 1");
  if (!(area > 0.0) || !std::isfinite(area)) throw InvalidArgument("knn radius needs area > 0");
  const double density = static_cast<double>(n) / area;
  return std::sqrt(static_cast<double>(k) / (std::numbers::pi * density));
}

std::uint32_t knn_round_bound(std::uint64_t k, std::uint64_t n, const Rect& data_mbr) {
  if (k < 2) throw InvalidArgument("knn round bound is undefined for k < 2");
  if (n < 1) throw InvalidArgument("knn round bound needs n >= 1");
  const double w = data_mbr.width();
  const double h = data_mbr.height();
  if (!(w > 0.0) || !(h > 0.0)) throw InvalidArgument("knn round bound needs a non-degenerate MBR");
  const double kd = static_cast<double>(k);
  const double numerator = std::log(std::sqrt(w * w + h * h)) -
                           std::log(std::sqrt(kd * w * h / (std::numbers::pi * n)));
  const double denominator = std::log(4.0 * kd / (std::numbers::pi * (kd - 1.0)));
  const double rounds = std::ceil(numerator / denominator);
  return rounds < 1.0 ? 1u : static_cast<std::uint32_t>(rounds);
}

double knn_growth_factor(std::uint32_t k, double growth_k1) {
  if (k < 2) return growth_k1;
  const double kd = k;
  return 4.0 * kd / (std::numbers::pi * (kd - 1.0));
}

}  // namespace lilis

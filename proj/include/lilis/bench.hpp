#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lilis/engine.hpp"

namespace lilis {

struct Workload {
  enum class Type { Point, Range, Circle, Knn, Join, Mixed };
  enum class Skew { Skewed, Uniform };

  static constexpr double kDefaultSelectivity = 1e-7;  // 0.00001 %
  static constexpr double kMinSelectivity = 1e-8;
  static constexpr double kMaxSelectivity = 1e-3;

  Type type = Type::Range;
  double selectivity = kDefaultSelectivity;
  Skew skew = Skew::Skewed;
  std::uint32_t k = 10;
  std::size_t count = 100;
  std::size_t runs = 50;
  std::uint64_t seed = 42;
};

const char* to_string(Workload::Type type);
const char* to_string(Workload::Skew skew);
Workload::Type parse_query_type(std::string_view text);
Workload::Skew parse_skew(std::string_view text);

/// Seeded query list. Skewed centers are drawn from the data, uniform centers
/// from the data MBR; windows are squares with area = selectivity * MBR area.
/// A join workload is a single JoinQuery carrying `count` polygons.
std::vector<QuerySpec> gen_workload(const PartitionedDataset& dataset, const Workload& w);

/// Side of a square window whose area is `selectivity` of the MBR area.
double window_side(const Rect& mbr, double selectivity);

struct LatencyStats {
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p99_ms = 0.0;
};
LatencyStats summarize(std::vector<double> samples_ms);

struct BenchRow {
  std::string mode;  // latency | throughput | knn
  std::string strategy;
  std::string key;
  int epsilon = 0;
  int radix_bits = 0;
  std::string query;
  double selectivity = 0.0;
  std::string skew;
  std::uint32_t k = 0;
  std::size_t count = 0;
  std::size_t runs = 0;
  std::uint32_t workers = 0;
  LatencyStats latency;
  double mean_results = 0.0;
  double jobs_per_minute = 0.0;
  // kNN only
  std::map<std::uint32_t, std::size_t> rounds_histogram;
  std::uint32_t round_bound = 0;  // 0 when undefined (k = 1)
  double within_bound = 0.0;      // fraction of queries with rounds <= bound
  double within_two = 0.0;        // fraction of queries with rounds <= 2
};

/// count x runs queries issued one at a time.
BenchRow run_latency(const Engine& engine, const Workload& w);
/// `count` queries spread over `submitters` concurrent callers; reports jobs/minute.
BenchRow run_throughput(const Engine& engine, const Workload& w, std::uint32_t submitters);
/// Latency plus a rounds histogram checked against the window-round bound.
BenchRow run_knn(const Engine& engine, const Workload& w);

struct BuildCost {
  double learned_ms = 0.0;
  double rtree_ms = 0.0;
  std::size_t partitions = 0;
  std::size_t objects = 0;
  std::size_t knots = 0;
  double speedup() const { return learned_ms > 0.0 ? rtree_ms / learned_ms : 0.0; }
};

/// Per-partition index build time: spline + radix versus STR bulk load. Both start
/// from already sorted copies of each partition (the sort is shared, not timed).
BuildCost compare_build_cost(const PartitionedDataset& dataset,
                             std::uint32_t fanout = 64, std::size_t repeats = 1);

std::string format_table(const std::vector<BenchRow>& rows);
void write_report_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows);

}  // namespace lilis

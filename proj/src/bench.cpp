#include "lilis/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include "lilis/error.hpp"
#include "lilis/rtree.hpp"
#include "lilis/storage.hpp"

namespace lilis {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::size_t result_size(const ResultSet& rs) {
  return rs.objects.size() + rs.pairs.size() + (rs.found ? 1 : 0);
}

void validate(const Workload& w) {
  if (w.selectivity < Workload::kMinSelectivity || w.selectivity > Workload::kMaxSelectivity) {
    throw InvalidArgument("selectivity must be within [1e-8, 1e-3]");
  }
  if (w.count < 1) throw InvalidArgument("workload count must be >= 1");
  if (w.runs < 1) throw InvalidArgument("workload runs must be >= 1");
  if (w.k < 1) throw InvalidArgument("workload k must be >= 1");
}

BenchRow base_row(const Engine& engine, const Workload& w, std::string mode) {
  const auto& ds = engine.dataset();
  BenchRow row;
  row.mode = std::move(mode);
  row.strategy = to_string(ds.strategy.kind);
  row.key = to_string(ds.key.kind);
  row.epsilon = ds.epsilon;
  row.radix_bits = ds.radix_bits;
  row.query = to_string(w.type);
  row.selectivity = w.selectivity;
  row.skew = to_string(w.skew);
  row.k = w.k;
  row.count = w.count;
  row.runs = w.runs;
  row.workers = engine.workers();
  return row;
}

}  // namespace

const char* to_string(Workload::Type type) {
  switch (type) {
    case Workload::Type::Point: return "point";
    case Workload::Type::Range: return "range";
    case Workload::Type::Circle: return "circle";
    case Workload::Type::Knn: return "knn";
    case Workload::Type::Join: return "join";
    case Workload::Type::Mixed: return "mixed";
  }
  return "?";
}

const char* to_string(Workload::Skew skew) {
  return skew == Workload::Skew::Skewed ? "skewed" : "uniform";
}

Workload::Type parse_query_type(std::string_view text) {
  for (auto t : {Workload::Type::Point, Workload::Type::Range, Workload::Type::Circle,
                 Workload::Type::Knn, Workload::Type::Join, Workload::Type::Mixed}) {
    if (text == to_string(t)) return t;
  }
  throw InvalidArgument("unknown query type '" + std::string(text) + "'");
}

Workload::Skew parse_skew(std::string_view text) {
  if (text == "skewed") return Workload::Skew::Skewed;
  if (text == "uniform") return Workload::Skew::Uniform;
  throw InvalidArgument("unknown skew '" + std::string(text) + "'");
}

double window_side(const Rect& mbr, double selectivity) {
  return std::sqrt(selectivity * mbr.width() * mbr.height());
}

std::vector<QuerySpec> gen_workload(const PartitionedDataset& ds, const Workload& w) {
  validate(w);
  if (ds.total == 0) throw InvalidArgument("cannot generate a workload over an empty dataset");
  std::mt19937_64 rng(w.seed);
  const Rect& mbr = ds.global_mbr;

  // Global ordinal -> object, for drawing centers from the data itself.
  std::vector<std::uint64_t> prefix;
  prefix.reserve(ds.partitions.size() + 1);
  prefix.push_back(0);
  for (const auto& p : ds.partitions) prefix.push_back(prefix.back() + p.objects.size());
  std::uniform_int_distribution<std::uint64_t> pick(0, ds.total - 1);
  auto data_point = [&]() {
    const std::uint64_t g = pick(rng);
    const auto it = std::upper_bound(prefix.begin(), prefix.end(), g) - 1;
    const auto part = static_cast<std::size_t>(it - prefix.begin());
    return ds.partitions[part].objects[g - *it].point();
  };
  std::uniform_real_distribution<double> ux(mbr.x_lo, mbr.x_hi);
  std::uniform_real_distribution<double> uy(mbr.y_lo, mbr.y_hi);
  auto center = [&]() -> Point {
    if (w.skew == Workload::Skew::Skewed) return data_point();
    const double x = ux(rng);
    return {x, uy(rng)};
  };

  const double side = window_side(mbr, w.selectivity);
  const double half = 0.5 * side;
  const double radius = std::sqrt(w.selectivity * mbr.area() / std::numbers::pi);
  auto range_at = [&](Point c) {
    return RangeQuery{{c.x - half, c.y - half, c.x + half, c.y + half}};
  };

  std::vector<QuerySpec> out;
  if (w.type == Workload::Type::Join) {
    JoinQuery jq;
    jq.polygons.reserve(w.count);
    const double r = std::max(radius, 1e-12);
    for (std::size_t i = 0; i < w.count; ++i) {
      const Point c = center();
      auto pg = gen_polygons(1, Rect::around(c), r, rng());
      pg.front().id = "pg" + std::to_string(i);
      jq.polygons.push_back(std::move(pg.front()));
    }
    out.emplace_back(std::move(jq));
    return out;
  }

  out.reserve(w.count);
  for (std::size_t i = 0; i < w.count; ++i) {
    const Point c = center();
    switch (w.type) {
      case Workload::Type::Point: out.emplace_back(PointQuery{c}); break;
      case Workload::Type::Range: out.emplace_back(range_at(c)); break;
      case Workload::Type::Circle: out.emplace_back(CircleQuery{{c, radius}}); break;
      case Workload::Type::Knn: {
        KnnParams params;
        params.k = static_cast<std::uint32_t>(std::min<std::uint64_t>(w.k, ds.total));
        out.emplace_back(KnnQuery{c, params});
        break;
      }
      case Workload::Type::Mixed:
        if (i % 2 == 0) {
          out.emplace_back(PointQuery{c});
        } else {
          out.emplace_back(range_at(c));
        }
        break;
      case Workload::Type::Join: break;
    }
  }
  return out;
}

LatencyStats summarize(std::vector<double> samples) {
  LatencyStats s;
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  s.mean_ms = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
  const std::size_t n = samples.size();
  s.median_ms = n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  const auto p99 = static_cast<std::size_t>(std::ceil(0.99 * n)) - 1;
  s.p99_ms = samples[std::min(p99, n - 1)];
  return s;
}

BenchRow run_latency(const Engine& engine, const Workload& w) {
  const auto queries = gen_workload(engine.dataset(), w);
  BenchRow row = base_row(engine, w, "latency");
  std::vector<double> samples;
  samples.reserve(queries.size() * w.runs);
  std::size_t results = 0;
  for (std::size_t run = 0; run < w.runs; ++run) {
    for (const auto& q : queries) {
      const auto start = Clock::now();
      const ResultSet rs = engine.execute(q);
      samples.push_back(elapsed_ms(start));
      results += result_size(rs);
    }
  }
  row.mean_results = static_cast<double>(results) / static_cast<double>(samples.size());
  row.latency = summarize(std::move(samples));
  return row;
}

BenchRow run_throughput(const Engine& engine, const Workload& w, std::uint32_t submitters) {
  if (submitters < 1) throw InvalidArgument("throughput needs >= 1 submitter");
  const auto queries = gen_workload(engine.dataset(), w);
  BenchRow row = base_row(engine, w, "throughput");
  row.workers = submitters;

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> results{0};
  std::vector<double> samples(queries.size());
  const auto start = Clock::now();
  {
    std::vector<std::jthread> pool;
    pool.reserve(submitters);
    for (std::uint32_t t = 0; t < submitters; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < queries.size(); i = next++) {
          const auto q_start = Clock::now();
          const ResultSet rs = engine.execute(queries[i]);
          samples[i] = elapsed_ms(q_start);
          results += result_size(rs);
        }
      });
    }
  }
  const double wall_ms = elapsed_ms(start);
  row.jobs_per_minute = static_cast<double>(queries.size()) / (wall_ms / 60000.0);
  row.mean_results = static_cast<double>(results.load()) / static_cast<double>(queries.size());
  row.latency = summarize(std::move(samples));
  row.runs = 1;
  return row;
}

BenchRow run_knn(const Engine& engine, const Workload& base) {
  Workload w = base;
  w.type = Workload::Type::Knn;
  const auto queries = gen_workload(engine.dataset(), w);
  BenchRow row = base_row(engine, w, "knn");
  const auto& ds = engine.dataset();
  const bool bounded = w.k >= 2 && ds.global_mbr.width() > 0.0 && ds.global_mbr.height() > 0.0;
  if (bounded) row.round_bound = knn_round_bound(w.k, ds.total, ds.global_mbr);

  std::vector<double> samples;
  std::size_t within_bound = 0, within_two = 0, results = 0;
  for (std::size_t run = 0; run < w.runs; ++run) {
    for (const auto& q : queries) {
      const auto start = Clock::now();
      const ResultSet rs = engine.execute(q);
      samples.push_back(elapsed_ms(start));
      results += rs.objects.size();
      if (run == 0) {
        ++row.rounds_histogram[rs.rounds];
        if (bounded && rs.rounds <= row.round_bound) ++within_bound;
        if (rs.rounds <= 2) ++within_two;
      }
    }
  }
  row.within_bound = bounded ? static_cast<double>(within_bound) / queries.size() : 0.0;
  row.within_two = static_cast<double>(within_two) / queries.size();
  row.mean_results = static_cast<double>(results) / samples.size();
  row.latency = summarize(std::move(samples));
  return row;
}

BuildCost compare_build_cost(const PartitionedDataset& ds, std::uint32_t fanout,
                             std::size_t repeats) {
  BuildCost best;
  best.learned_ms = best.rtree_ms = std::numeric_limits<double>::infinity();
  for (std::size_t rep = 0; rep < std::max<std::size_t>(1, repeats); ++rep) {
    BuildCost cost;
    for (const auto& part : ds.partitions) {
      if (part.objects.empty()) continue;
      ++cost.partitions;
      cost.objects += part.objects.size();

      // Shared sort: both builders receive their input already ordered.
      std::vector<SpatialObject> by_key = part.objects;
      std::sort(by_key.begin(), by_key.end(), canonical_less);
      std::vector<SpatialObject> by_x = part.objects;
      std::sort(by_x.begin(), by_x.end(), [](const SpatialObject& a, const SpatialObject& b) {
        return std::tie(a.x, a.y, a.payload) < std::tie(b.x, b.y, b.payload);
      });

      auto start = Clock::now();
      std::vector<double> keys(by_key.size());
      for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = by_key[i].key;
      const SplineIndex idx = SplineIndex::build(keys, ds.epsilon, ds.radix_bits);
      cost.learned_ms += elapsed_ms(start);
      cost.knots += idx.knots().size();

      start = Clock::now();
      const RTree tree = RTree::bulk_load(std::move(by_x), fanout, true);
      cost.rtree_ms += elapsed_ms(start);
      if (tree.entries().size() != part.objects.size()) throw Error("R-tree lost entries");
    }
    best.partitions = cost.partitions;
    best.objects = cost.objects;
    best.knots = cost.knots;
    best.learned_ms = std::min(best.learned_ms, cost.learned_ms);
    best.rtree_ms = std::min(best.rtree_ms, cost.rtree_ms);
  }
  return best;
}

std::string format_table(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(11) << "mode" << std::setw(9) << "query" << std::setw(10)
      << "strategy" << std::setw(7) << "key" << std::setw(10) << "select" << std::setw(9)
      << "skew" << std::setw(5) << "k" << std::setw(11) << "mean_ms" << std::setw(11)
      << "median_ms" << std::setw(11) << "p99_ms" << std::setw(10) << "results" << std::setw(13)
      << "jobs/min" << "rounds\n";
  out << std::setprecision(4);
  for (const auto& r : rows) {
    std::ostringstream rounds;
    for (const auto& [rounds_used, n] : r.rounds_histogram) rounds << rounds_used << ':' << n << ' ';
    if (r.round_bound) rounds << "(bound " << r.round_bound << ", within " << r.within_bound * 100 << "%)";
    out << std::left << std::setw(11) << r.mode << std::setw(9) << r.query << std::setw(10)
        << r.strategy << std::setw(7) << r.key << std::setw(10) << r.selectivity << std::setw(9)
        << r.skew << std::setw(5) << r.k << std::setw(11) << r.latency.mean_ms << std::setw(11)
        << r.latency.median_ms << std::setw(11) << r.latency.p99_ms << std::setw(10)
        << r.mean_results << std::setw(13) << r.jobs_per_minute << rounds.str() << '\n';
  }
  return out.str();
}

void write_report_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report: " + path.string());
  out << "mode,query,strategy,key,epsilon,radix_bits,selectivity,skew,k,count,runs,workers,"
         "mean_ms,median_ms,p99_ms,mean_results,jobs_per_minute,round_bound,within_bound,"
         "within_two,rounds_histogram\n";
  out << std::setprecision(10);
  for (const auto& r : rows) {
    std::ostringstream hist;
    bool first = true;
    for (const auto& [rounds_used, n] : r.rounds_histogram) {
      hist << (first ? "" : ";") << rounds_used << ':' << n;
      first = false;
    }
    out << r.mode << ',' << r.query << ',' << r.strategy << ',' << r.key << ',' << r.epsilon
        << ',' << r.radix_bits << ',' << r.selectivity << ',' << r.skew << ',' << r.k << ','
        << r.count << ',' << r.runs << ',' << r.workers << ',' << r.latency.mean_ms << ','
        << r.latency.median_ms << ',' << r.latency.p99_ms << ',' << r.mean_results << ','
        << r.jobs_per_minute << ',' << r.round_bound << ',' << r.within_bound << ','
        << r.within_two << ',' << hist.str() << '\n';
  }
}

}  // namespace lilis

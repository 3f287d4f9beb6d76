// Prints one PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any gating criterion fails. Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "lilis/lilis.hpp"
#include "oracles.hpp"

using namespace lilis;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
  bool gating = true;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<SpatialObject> synth(const char* text, std::uint64_t seed) {
  auto spec = parse_synthetic(text);
  spec.seed = seed;
  return gen_synthetic(spec);
}

std::vector<double> sorted_keys(const std::vector<SpatialObject>& data, const KeyStrategy& key) {
  std::vector<double> keys;
  keys.reserve(data.size());
  for (const auto& o : data) keys.push_back(project_key(o.point(), key));
  std::sort(keys.begin(), keys.end());
  return keys;
}

struct IndexCase {
  std::string name;
  std::vector<double> keys;
  SplineIndex index;
};

// Shared by criteria 1 and 2: three 100k datasets x three epsilons x two keys.
const std::vector<IndexCase>& index_cases() {
  static const std::vector<IndexCase> cases = [] {
    std::vector<IndexCase> out;
    const std::pair<const char*, const char*> sets[] = {
        {"uniform", "uniform:100000"}, {"gaussian", "gaussian:100000"}, {"zipf", "zipf:100000"}};
    for (const auto& [name, text] : sets) {
      const auto data = synth(text, 42);
      Rect mbr = Rect::empty();
      for (const auto& o : data) mbr.expand(o.point());
      for (const auto& key : {KeyStrategy::axis_x(), KeyStrategy::zorder(16, zorder_domain_for(mbr))}) {
        auto keys = sorted_keys(data, key);
        for (int eps : {8, 32, 128}) {
          out.push_back({fmt("%s/%s/eps%d", name, to_string(key.kind), eps), keys,
                         SplineIndex::build(keys, eps, SplineIndex::kDefaultRadixBits)});
        }
      }
    }
    return out;
  }();
  return cases;
}

Outcome epsilon_contract() {
  const auto start = Clock::now();
  std::size_t violations = 0, checked = 0;
  for (const auto& c : index_cases()) {
    for (const auto& p : first_occurrences(c.keys)) {
      const auto pred = c.index.predict(p.key);
      ++checked;
      if (p.position < pred.lo || p.position > pred.hi) ++violations;
    }
  }
  const double secs = seconds_since(start);
  return {violations == 0 && secs < 60.0,
          fmt("%zu indexes, %zu distinct keys checked, %zu violations, %.1fs (limit 60s)",
              index_cases().size(), checked, violations, secs)};
}

Outcome radix_equivalence() {
  std::size_t mismatches = 0, checked = 0;
  std::mt19937_64 rng(2);
  for (const auto& c : index_cases()) {
    const double span = c.keys.back() - c.keys.front();
    std::uniform_real_distribution<double> u(c.keys.front() - 0.01 * span,
                                             c.keys.back() + 0.01 * span);
    for (int i = 0; i < 10000; ++i) {
      const double k = u(rng);
      ++checked;
      if (c.index.find_segment(k) != c.index.find_segment_binary(k)) ++mismatches;
    }
  }
  return {mismatches == 0, fmt("%zu lookups over %zu indexes, %zu mismatches", checked,
                               index_cases().size(), mismatches)};
}

std::vector<PartitionStrategy> strategies() {
  return {PartitionStrategy::fixed_grid(8, 8), PartitionStrategy::adaptive_grid(8, 8),
          PartitionStrategy::quadtree(64), PartitionStrategy::kdtree(64),
          PartitionStrategy::rtree_leaves(16)};
}

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  const auto data = oracle::clustered(10000, 3);
  std::size_t queries = 0, mismatches = 0;
  std::string failures;
  for (const auto& key : {KeyStrategy::axis_x(), KeyStrategy::zorder(16)}) {
    for (const auto& s : strategies()) {
      BuildOptions opt;
      opt.strategy = s;
      opt.key = key;
      opt.sample_rate = 0.05;
      const Engine engine(build_dataset(data, opt), 4);
      const auto all = oracle::all_objects(engine.dataset());
      std::size_t bad = 0;
      std::mt19937_64 rng(7);
      std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
      std::uniform_real_distribution<double> u(-0.05, 1.05), rad(0.0, 0.15);

      for (int i = 0; i < 1000; ++i) {
        const Point p = i % 2 == 0 ? all[pick(rng)].point() : Point{u(rng), u(rng)};
        bad += engine.point_query(p) != oracle::contains(all, p);
      }
      for (int i = 0; i < 500; ++i) {
        const Rect q = oracle::random_rect(rng, {-0.05, -0.05, 1.0, 1.0}, 0.2);
        bad += engine.range_query(q) != oracle::range(all, q);
      }
      for (int i = 0; i < 200; ++i) {
        const Circle c{{u(rng), u(rng)}, rad(rng)};
        bad += engine.circle_query(c) != oracle::circle(all, c);
      }
      const std::uint32_t ks[] = {1, 5, 10, 50};
      for (int i = 0; i < 200; ++i) {
        const Point q{u(rng), u(rng)};
        const std::uint32_t k = ks[i % 4];
        bad += engine.knn_query(q, {k}).objects != oracle::knn(all, q, k);
      }
      const auto polygons = gen_polygons(50, {0, 0, 1, 1}, 0.05, 11);
      bad += engine.spatial_join(polygons) != oracle::join(all, polygons);

      queries += 1000 + 500 + 200 + 200 + 1;
      mismatches += bad;
      if (bad) failures += fmt(" %s/%s:%zu", to_string(s.kind), to_string(key.kind), bad);
    }
  }
  const double secs = seconds_since(start);
  return {mismatches == 0 && secs < 300.0,
          fmt("%zu queries over 5 strategies x {x, zorder}, %zu mismatches%s, %.1fs (limit 300s)",
              queries, mismatches, failures.c_str(), secs)};
}

struct KnnRounds {
  std::size_t over_bound = 0;
  std::size_t total = 0;
  std::size_t small_k = 0;
  std::size_t small_k_within_two = 0;
  std::string per_k;
};

const KnnRounds& knn_rounds() {
  static const KnnRounds r = [] {
    KnnRounds out;
    const auto data = synth("uniform:100000", 42);
    const Engine engine(build_dataset(data, {}), 1);
    const auto& ds = engine.dataset();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ux(ds.global_mbr.x_lo, ds.global_mbr.x_hi);
    std::uniform_real_distribution<double> uy(ds.global_mbr.y_lo, ds.global_mbr.y_hi);
    for (std::uint32_t k : {2u, 5u, 10u, 50u}) {
      const auto bound = knn_round_bound(k, ds.total, ds.global_mbr);
      std::uint32_t worst = 0;
      std::size_t two = 0;
      for (int i = 0; i < 200; ++i) {
        const double x = ux(rng);
        const auto res = engine.knn_query({x, uy(rng)}, {k});
        worst = std::max(worst, res.rounds);
        out.over_bound += res.rounds > bound;
        two += res.rounds <= 2;
        ++out.total;
      }
      if (k < 10) {
        out.small_k += 200;
        out.small_k_within_two += two;
      }
      out.per_k += fmt(" k=%u:max %u/bound %u,<=2 %.0f%%", k, worst, bound, two / 2.0);
    }
    return out;
  }();
  return r;
}

Outcome knn_bound() {
  const auto& r = knn_rounds();
  return {r.over_bound == 0, fmt("%zu/%zu queries within the round bound;%s", r.total - r.over_bound,
                                 r.total, r.per_k.c_str())};
}

Outcome knn_within_two() {
  const auto& r = knn_rounds();
  const double frac = static_cast<double>(r.small_k_within_two) / r.small_k;
  return {frac >= 0.90,
          fmt("%.1f%% of k<10 queries used <= 2 rounds (target 90%%, directional, not gating)",
              100.0 * frac),
          false};
}

const std::vector<SpatialObject>& five_million() {
  static const auto data = synth("uniform:5000000", 42);
  return data;
}

const PartitionedDataset& five_million_dataset() {
  static const auto ds = build_dataset(five_million(), {});
  return ds;
}

Outcome build_cost() {
  const auto start = Clock::now();
  const auto cost = compare_build_cost(five_million_dataset(), RTree::kDefaultFanout, 3);
  const double secs = seconds_since(start);
  return {cost.learned_ms <= cost.rtree_ms && secs < 180.0,
          fmt("learned %.1f ms vs STR %.1f ms over %zu partitions / %zu objects: %.2fx "
              "(target 1.2x), %.1fs (limit 180s)",
              cost.learned_ms, cost.rtree_ms, cost.partitions, cost.objects, cost.speedup(), secs)};
}

Outcome query_vs_scan() {
  const Engine engine(five_million_dataset(), Engine::kDefaultWorkers);
  const auto& data = five_million();
  Workload w;
  w.selectivity = 1e-6;
  w.count = 50;
  w.seed = 6;
  const auto queries = gen_workload(engine.dataset(), w);
  std::vector<double> indexed, scanned;
  std::size_t disagreements = 0;
  for (const auto& q : queries) {
    const Rect& r = std::get<RangeQuery>(q).rect;
    auto t = Clock::now();
    const auto hits = engine.range_query(r);
    indexed.push_back(seconds_since(t) * 1e3);
    t = Clock::now();
    std::size_t count = 0;
    for (const auto& o : data) count += rect_contains_point(r, o.point());
    scanned.push_back(seconds_since(t) * 1e3);
    disagreements += count != hits.size();
  }
  const double med_idx = summarize(indexed).median_ms;
  const double med_scan = summarize(scanned).median_ms;
  const double ratio = med_scan / med_idx;
  return {ratio >= 10.0 && disagreements == 0,
          fmt("median %.4f ms indexed vs %.2f ms scan: %.0fx (need 10x), %zu count mismatches",
              med_idx, med_scan, ratio, disagreements)};
}

const std::vector<SpatialObject>& one_million() {
  static const auto data = synth("gaussian:1000000", 42);
  return data;
}

Outcome conservation() {
  std::string detail;
  bool ok = true;
  for (const auto& s : strategies()) {
    BuildOptions opt;
    opt.strategy = s;
    const auto ds = build_dataset(one_million(), opt);
    std::uint64_t sum = 0;
    std::size_t outside = 0;
    for (const auto& p : ds.partitions) {
      sum += p.descriptor.count;
      if (p.descriptor.count != p.objects.size()) ok = false;
      if (p.descriptor.overflow) continue;
      for (const auto& o : p.objects) outside += !rect_contains_point(p.descriptor.mbr, o.point());
    }
    const auto overflow = ds.overflow().objects.size();
    const bool overflow_ok = overflow == 0 || s.kind == PartitionStrategy::Kind::RTreeLeaves;
    ok = ok && sum == one_million().size() && outside == 0 && overflow_ok;
    detail += fmt(" %s:sum=%llu,outside=%zu,overflow=%zu;", to_string(s.kind),
                  static_cast<unsigned long long>(sum), outside, overflow);
  }
  return {ok, fmt("N=%zu%s", one_million().size(), detail.c_str())};
}

const PartitionedDataset& one_million_dataset() {
  static const auto ds = build_dataset(one_million(), {});
  return ds;
}

Outcome determinism_and_snapshot() {
  const auto& ds = one_million_dataset();
  const Engine one(ds, 1), eight(ds, 8);
  std::size_t differing = 0, total = 0;
  for (auto type : {Workload::Type::Point, Workload::Type::Range, Workload::Type::Circle,
                    Workload::Type::Knn, Workload::Type::Join}) {
    Workload w;
    w.type = type;
    w.selectivity = 1e-4;
    w.count = type == Workload::Type::Join ? 20 : 50;
    for (const auto& q : gen_workload(ds, w)) {
      ++total;
      differing += !(one.execute(q) == eight.execute(q));
    }
  }
  const bool rebuild_same = build_dataset(one_million(), {}) == ds;
  const std::string bytes = encode_snapshot(ds);
  const bool round_trip = decode_snapshot(bytes) == ds;

  // Flip one byte inside every partition block body and in the header.
  std::size_t detected = 0, corruptions = 0;
  std::size_t offset = sizeof(kSnapshotMagic) + 2 + 8 + 4 + 1 + 4 + 4 + 4 + 32 + 32 + 1 + 4 + 4 + 4;
  std::vector<std::size_t> targets{sizeof(kSnapshotMagic) + 3};
  while (offset + 4 <= bytes.size()) {
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= std::uint32_t(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
    targets.push_back(offset + 4 + len / 2);
    offset += 4 + len + 4;
  }
  for (std::size_t t : targets) {
    std::string bad = bytes;
    bad[t] = static_cast<char>(bad[t] ^ 0x5a);
    ++corruptions;
    try {
      decode_snapshot(bad);
    } catch (const FormatError&) {
      ++detected;
    }
  }
  return {differing == 0 && rebuild_same && round_trip && detected == corruptions,
          fmt("workers 1 vs 8: %zu/%zu differ; rebuild identical: %s; round trip equal: %s; "
              "corruptions detected %zu/%zu",
              differing, total, rebuild_same ? "yes" : "no", round_trip ? "yes" : "no", detected,
              corruptions)};
}

Outcome throughput() {
  const auto path = std::filesystem::temp_directory_path() / "lilis_acceptance_1m.lilis";
  save_snapshot(one_million_dataset(), path);
  const auto start = Clock::now();
  const Engine engine(load_snapshot(path), 8);
  Workload w;
  w.type = Workload::Type::Mixed;
  w.count = 100;
  w.selectivity = 1e-5;
  const auto row = run_throughput(engine, w, 8);
  const double secs = seconds_since(start);
  std::filesystem::remove(path);
  return {row.jobs_per_minute > 0.0 && secs < 60.0,
          fmt("100 mixed queries, 8 submitters: %.0f jobs/min, %.2fs including snapshot load "
              "(limit 60s)",
              row.jobs_per_minute, secs)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "spline epsilon contract", epsilon_contract},
      {2, "radix table equivalence", radix_equivalence},
      {3, "query oracle equivalence", oracle_equivalence},
      {4, "knn round bound", knn_bound},
      {4, "knn <= 2 rounds for k<10", knn_within_two},
      {5, "build cost vs STR", build_cost},
      {6, "range query vs linear scan", query_vs_scan},
      {7, "partition conservation", conservation},
      {8, "determinism and snapshot", determinism_and_snapshot},
      {9, "throughput smoke", throughput},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const char* status = o.pass ? "PASS" : (o.gating ? "FAIL" : "MISS");
    std::printf("%s  [%d] %s: %s\n", status, c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && o.gating) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

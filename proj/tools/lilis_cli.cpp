#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "lilis/lilis.hpp"

using namespace lilis;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

// Flag > LILIS_SEED > built-in default.
std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t value) {
  if (flag->count() > 0) return value;
  if (const char* env = std::getenv("LILIS_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string("LILIS_SEED is not an unsigned integer: ") + env);
    }
  }
  return value;
}

std::vector<double> parse_numbers(const std::string& text, std::size_t expected,
                                  const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string("bad number in ") + what + ": '" + item + "'");
    }
  }
  if (expected && out.size() != expected) {
    throw InvalidArgument(std::string(what) + " needs " + std::to_string(expected) +
                          " comma-separated numbers");
  }
  return out;
}

KeyStrategy parse_key(const std::string& name, int bits) {
  if (name == "x") return KeyStrategy::axis_x();
  if (name == "y") return KeyStrategy::axis_y();
  if (name == "zorder") return KeyStrategy::zorder(bits);
  throw InvalidArgument("unknown key '" + name + "' (x, y, zorder)");
}

struct BuildArgs {
  std::string gen;
  std::string csv;
  std::size_t x_col = 0;
  std::size_t y_col = 1;
  int payload_col = -1;
  char delimiter = ',';
  bool no_header = false;
  std::string strategy = "kdtree";
  std::string grid = "8x8";
  std::uint32_t max_leaf = 0;
  std::uint32_t fanout = RTree::kDefaultFanout;
  std::string key = "x";
  int zorder_bits = 16;
  int epsilon = SplineIndex::kDefaultEpsilon;
  int radix_bits = SplineIndex::kDefaultRadixBits;
  double sample_rate = 0.01;
  std::uint32_t workers = Engine::kDefaultWorkers;
  std::uint64_t seed = 42;
  CLI::Option* seed_opt = nullptr;
  bool compare_rtree = false;
  std::string out;
};

PartitionStrategy parse_strategy(const BuildArgs& a, std::size_t n) {
  const auto grid = [&]() -> std::pair<std::uint32_t, std::uint32_t> {
    unsigned nx = 0, ny = 0;
    char sep = 0;
    std::istringstream in(a.grid);
    if (!(in >> nx >> sep >> ny) || sep != 'x' || !in.eof()) {
      throw InvalidArgument("--grid expects NXxNY, e.g. 8x8");
    }
    return {nx, ny};
  };
  const auto leaf = [&]() -> std::uint32_t {
    if (a.max_leaf) return a.max_leaf;
    const auto expected = static_cast<std::size_t>(a.sample_rate * static_cast<double>(n));
    return default_strategy(std::max<std::size_t>(expected, 1), a.workers).a;
  };
  if (a.strategy == "fixed") return PartitionStrategy::fixed_grid(grid().first, grid().second);
  if (a.strategy == "adaptive") return PartitionStrategy::adaptive_grid(grid().first, grid().second);
  if (a.strategy == "quadtree") return PartitionStrategy::quadtree(leaf());
  if (a.strategy == "kdtree") return PartitionStrategy::kdtree(leaf());
  if (a.strategy == "rtree") return PartitionStrategy::rtree_leaves(a.fanout);
  throw InvalidArgument("unknown strategy '" + a.strategy +
                        "' (fixed, adaptive, quadtree, kdtree, rtree)");
}

int cmd_build(const BuildArgs& a) {
  if (a.gen.empty() == a.csv.empty()) throw InvalidArgument("build needs exactly one of --gen or --csv");
  if (a.out.empty()) throw InvalidArgument("build needs -o <snapshot>");
  const std::uint64_t seed = resolve_seed(a.seed_opt, a.seed);

  std::vector<SpatialObject> objects;
  if (!a.gen.empty()) {
    auto spec = parse_synthetic(a.gen);
    spec.seed = seed;
    objects = gen_synthetic(spec);
  } else {
    CsvSchema schema;
    schema.delimiter = a.delimiter;
    schema.x_column = a.x_col;
    schema.y_column = a.y_col;
    if (a.payload_col >= 0) schema.payload_column = static_cast<std::size_t>(a.payload_col);
    schema.has_header = !a.no_header;
    auto r = ingest_csv(a.csv, schema);
    if (r.skipped) std::cerr << "skipped " << r.skipped << " malformed rows\n";
    objects = std::move(r.objects);
  }

  BuildOptions opt;
  opt.strategy = parse_strategy(a, objects.size());
  opt.key = parse_key(a.key, a.zorder_bits);
  opt.epsilon = a.epsilon;
  opt.radix_bits = a.radix_bits;
  opt.sample_rate = a.sample_rate;
  opt.seed = seed;
  opt.workers = a.workers;

  const auto start = Clock::now();
  const PartitionedDataset ds = build_dataset(objects, opt);
  const double build_ms = ms_since(start);
  save_snapshot(ds, a.out);

  std::size_t min_size = SIZE_MAX, max_size = 0, knots = 0, empty = 0;
  for (const auto& p : ds.partitions) {
    if (p.descriptor.overflow) continue;
    min_size = std::min<std::size_t>(min_size, p.objects.size());
    max_size = std::max<std::size_t>(max_size, p.objects.size());
    empty += p.objects.empty();
    if (p.index) knots += p.index->knots().size();
  }
  if (ds.overflow().index) knots += ds.overflow().index->knots().size();

  std::printf("snapshot       %s (crc32 %08x)\n", a.out.c_str(), crc32(encode_snapshot(ds)));
  std::printf("objects        %llu\n", static_cast<unsigned long long>(ds.total));
  std::printf("strategy       %s (param %u %u), key %s, epsilon %d, radix bits %d\n",
              to_string(ds.strategy.kind), ds.strategy.a, ds.strategy.b, to_string(ds.key.kind),
              ds.epsilon, ds.radix_bits);
  std::printf("partitions     %zu + overflow (%zu empty)\n", ds.partitions.size() - 1, empty);
  std::printf("sizes          min %zu, max %zu\n", min_size, max_size);
  std::printf("overflow       %zu\n", ds.overflow().objects.size());
  std::printf("knots          %zu\n", knots);
  std::printf("build ms       %.2f (partition + learned index)\n", build_ms);
  if (a.compare_rtree) {
    const auto cost = compare_build_cost(ds, a.fanout, 3);
    std::printf("index build ms learned %.2f, rtree %.2f (%.2fx)\n", cost.learned_ms, cost.rtree_ms,
                cost.speedup());
  }
  return 0;
}

struct QueryArgs {
  std::string snapshot;
  std::string point;
  std::string range;
  std::string circle;
  std::string knn;
  std::uint32_t k = 10;
  std::string join;
  std::uint32_t workers = Engine::kDefaultWorkers;
};

void print_object(const SpatialObject& o) {
  std::printf("%.17g,%.17g,%llu\n", o.x, o.y, static_cast<unsigned long long>(o.payload));
}

int cmd_query(const QueryArgs& a) {
  const int chosen = !a.point.empty() + !a.range.empty() + !a.circle.empty() + !a.knn.empty() +
                     !a.join.empty();
  if (chosen != 1) {
    throw InvalidArgument("query needs exactly one of --point, --range, --circle, --knn, --join");
  }
  QuerySpec q;
  if (!a.point.empty()) {
    const auto v = parse_numbers(a.point, 2, "--point");
    q = PointQuery{{v[0], v[1]}};
  } else if (!a.range.empty()) {
    const auto v = parse_numbers(a.range, 4, "--range");
    q = RangeQuery{make_rect(v[0], v[1], v[2], v[3])};
  } else if (!a.circle.empty()) {
    const auto v = parse_numbers(a.circle, 3, "--circle");
    q = CircleQuery{make_circle({v[0], v[1]}, v[2])};
  } else if (!a.knn.empty()) {
    const auto v = parse_numbers(a.knn, 2, "--knn");
    KnnParams params;
    params.k = a.k;
    q = KnnQuery{{v[0], v[1]}, params};
  } else {
    auto file = parse_polygons(a.join);
    if (file.skipped) std::cerr << "skipped " << file.skipped << " malformed polygon lines\n";
    q = JoinQuery{std::move(file.polygons)};
  }

  const Engine engine(load_snapshot(a.snapshot), a.workers);
  const auto start = Clock::now();
  const ResultSet rs = engine.execute(q);
  const double elapsed = ms_since(start);

  std::size_t count = 0;
  if (std::holds_alternative<PointQuery>(q)) {
    std::printf("%s\n", rs.found ? "true" : "false");
    count = rs.found;
  } else if (std::holds_alternative<KnnQuery>(q)) {
    for (std::size_t i = 0; i < rs.objects.size(); ++i) {
      std::printf("%.17g,", rs.distances[i]);
      print_object(rs.objects[i]);
    }
    count = rs.objects.size();
  } else if (std::holds_alternative<JoinQuery>(q)) {
    for (const auto& p : rs.pairs) {
      std::printf("%s,", p.polygon_id.c_str());
      print_object(p.object);
    }
    count = rs.pairs.size();
  } else {
    for (const auto& o : rs.objects) print_object(o);
    count = rs.objects.size();
  }
  std::printf("# %zu results in %.4f ms", count, elapsed);
  if (std::holds_alternative<KnnQuery>(q)) std::printf(" (%u rounds)", rs.rounds);
  std::printf("\n");
  return 0;
}

struct BenchArgs {
  std::string snapshot;
  std::string type = "range";
  std::string selectivity = "1e-7";
  std::string skew = "skewed";
  std::string k = "10";
  std::size_t count = 100;
  std::size_t runs = 50;
  std::uint64_t seed = 42;
  CLI::Option* seed_opt = nullptr;
  bool throughput = false;
  std::uint32_t workers = Engine::kDefaultWorkers;
  std::string report;
};

int cmd_bench(const BenchArgs& a) {
  Workload base;
  base.type = parse_query_type(a.type);
  base.skew = parse_skew(a.skew);
  base.count = a.count;
  base.runs = a.runs;
  base.seed = resolve_seed(a.seed_opt, a.seed);
  const auto selectivities = parse_numbers(a.selectivity, 0, "--selectivity");
  std::vector<std::uint32_t> ks;
  for (double k : parse_numbers(a.k, 0, "--k")) {
    if (k < 1 || k != static_cast<std::uint32_t>(k)) throw InvalidArgument("--k values must be positive integers");
    ks.push_back(static_cast<std::uint32_t>(k));
  }
  if (selectivities.empty() || ks.empty()) throw InvalidArgument("--selectivity and --k need values");

  const Engine engine(load_snapshot(a.snapshot), a.workers);
  std::vector<BenchRow> rows;
  for (double sel : selectivities) {
    for (std::uint32_t k : ks) {
      Workload w = base;
      w.selectivity = sel;
      w.k = k;
      if (a.throughput) {
        rows.push_back(run_throughput(engine, w, a.workers));
      } else if (w.type == Workload::Type::Knn) {
        rows.push_back(run_knn(engine, w));
      } else {
        rows.push_back(run_latency(engine, w));
      }
    }
  }
  std::cout << format_table(rows);
  if (!a.report.empty()) write_report_csv(a.report, rows);
  return 0;
}

struct GenArgs {
  std::string gen;
  std::size_t polygons = 0;
  double radius = 0.01;
  std::string domain = "0,0,1,1";
  std::uint64_t seed = 42;
  CLI::Option* seed_opt = nullptr;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  if (a.gen.empty() == (a.polygons == 0)) throw InvalidArgument("gen needs exactly one of --gen or --polygons");
  if (a.out.empty()) throw InvalidArgument("gen needs -o <file>");
  const std::uint64_t seed = resolve_seed(a.seed_opt, a.seed);
  const auto d = parse_numbers(a.domain, 4, "--domain");
  const Rect domain = make_rect(d[0], d[1], d[2], d[3]);
  if (!a.gen.empty()) {
    auto spec = parse_synthetic(a.gen);
    spec.seed = seed;
    spec.domain = domain;
    const auto objects = gen_synthetic(spec);
    write_csv(a.out, objects);
    std::printf("wrote %zu points to %s\n", objects.size(), a.out.c_str());
  } else {
    const auto pgs = gen_polygons(a.polygons, domain, a.radius, seed);
    write_polygons(a.out, pgs);
    std::printf("wrote %zu polygons to %s\n", pgs.size(), a.out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lilis: learned-index spatial query engine"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Partition and index points, then save a snapshot");
  b->add_option("--gen", build.gen, "Synthetic input: uniform:N | gaussian:N[:clusters[:sigma]] | skewed:N[:s]");
  b->add_option("--csv", build.csv, "CSV input file");
  b->add_option("--x", build.x_col, "CSV column of x");
  b->add_option("--y", build.y_col, "CSV column of y");
  b->add_option("--payload", build.payload_col, "CSV column of the payload (default: row ordinal)");
  b->add_option("--delimiter", build.delimiter, "CSV delimiter");
  b->add_flag("--no-header", build.no_header, "CSV has no header row");
  b->add_option("--strategy", build.strategy, "fixed | adaptive | quadtree | kdtree | rtree");
  b->add_option("--grid", build.grid, "Cells for fixed/adaptive, NXxNY");
  b->add_option("--max-leaf", build.max_leaf, "Sample points per quadtree/kdtree leaf");
  b->add_option("--fanout", build.fanout, "R-tree fanout");
  b->add_option("--key", build.key, "x | y | zorder");
  b->add_option("--zorder-bits", build.zorder_bits, "Bits per dimension for zorder keys");
  b->add_option("--epsilon", build.epsilon, "Spline error bound");
  b->add_option("--radix-bits", build.radix_bits, "Radix table bits");
  b->add_option("--sample-rate", build.sample_rate, "Partition sample rate");
  b->add_option("--workers", build.workers, "Worker count the default partitioning targets");
  build.seed_opt = b->add_option("--seed", build.seed, "Sampling/generation seed (env LILIS_SEED)");
  b->add_flag("--compare-rtree", build.compare_rtree, "Also time STR R-tree bulk loading");
  b->add_option("-o,--output", build.out, "Snapshot path")->required();

  QueryArgs query;
  auto* q = app.add_subcommand("query", "Run one query against a snapshot");
  q->add_option("snapshot", query.snapshot)->required();
  q->add_option("--point", query.point, "x,y");
  q->add_option("--range", query.range, "x_lo,y_lo,x_hi,y_hi");
  q->add_option("--circle", query.circle, "x,y,radius");
  q->add_option("--knn", query.knn, "x,y");
  q->add_option("--k", query.k, "Neighbors for --knn");
  q->add_option("--join", query.join, "Polygon file (id;x1,y1 x2,y2 ...)");
  q->add_option("--workers", query.workers, "Local-search workers");

  BenchArgs bench;
  auto* be = app.add_subcommand("bench", "Benchmark a snapshot");
  be->add_option("snapshot", bench.snapshot)->required();
  be->add_option("--type", bench.type, "point | range | circle | knn | join | mixed");
  be->add_option("--selectivity", bench.selectivity, "Window area fraction; comma list sweeps");
  be->add_option("--skew", bench.skew, "skewed | uniform");
  be->add_option("--k", bench.k, "kNN k; comma list sweeps");
  be->add_option("--count", bench.count, "Queries per run");
  be->add_option("--runs", bench.runs, "Repetitions (latency mode)");
  bench.seed_opt = be->add_option("--seed", bench.seed, "Workload seed (env LILIS_SEED)");
  be->add_flag("--throughput", bench.throughput, "Concurrent submitters, report jobs/minute");
  be->add_option("--workers", bench.workers, "Engine workers and throughput submitters");
  be->add_option("--report", bench.report, "Write rows as CSV");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Write synthetic points (CSV) or polygons");
  g->add_option("--gen", gen.gen, "uniform:N | gaussian:N[:clusters[:sigma]] | skewed:N[:s]");
  g->add_option("--polygons", gen.polygons, "Number of random convex polygons");
  g->add_option("--radius", gen.radius, "Mean polygon radius");
  g->add_option("--domain", gen.domain, "x_lo,y_lo,x_hi,y_hi");
  gen.seed_opt = g->add_option("--seed", gen.seed, "Seed (env LILIS_SEED)");
  g->add_option("-o,--output", gen.out, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*b) return cmd_build(build);
    if (*q) return cmd_query(query);
    if (*be) return cmd_bench(bench);
    if (*g) return cmd_gen(gen);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

#include "lilis/storage.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "lilis/error.hpp"

namespace lilis {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

bool blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

IngestResult ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  if (schema.x_column == schema.y_column) {
    throw InvalidArgument("csv x and y columns must differ");
  }
  std::ifstream in(path);
  if (!in) throw DataError("cannot open csv file: " + path.string());

  IngestResult result;
  std::string line;
  bool header_pending = schema.has_header;
  std::uint64_t row = 0;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const std::uint64_t ordinal = row++;
    const auto fields = split(line, schema.delimiter);
    const auto need = std::max({schema.x_column, schema.y_column,
                                schema.payload_column.value_or(0)});
    if (fields.size() <= need) {
      ++result.skipped;
      continue;
    }
    const auto x = parse_double(fields[schema.x_column]);
    const auto y = parse_double(fields[schema.y_column]);
    if (!x || !y) {
      ++result.skipped;
      continue;
    }
    std::uint64_t payload = ordinal;
    if (schema.payload_column) {
      const std::string_view text = trim(fields[*schema.payload_column]);
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec == std::errc() && ptr == text.data() + text.size()) {
        payload = v;
      } else if (!text.empty()) {
        payload = string_to_key(text);
      }
    }
    result.objects.push_back({0.0, *x, *y, payload});
  }
  if (result.objects.empty()) throw DataError("no valid rows in csv file: " + path.string());
  return result;
}

std::optional<Polygon> parse_polygon_line(std::string_view line) {
  const std::size_t semi = line.find(';');
  if (semi == std::string_view::npos) return std::nullopt;
  const std::string_view id = trim(line.substr(0, semi));
  if (id.empty()) return std::nullopt;
  std::vector<Point> vertices;
  std::string_view rest = line.substr(semi + 1);
  while (!rest.empty()) {
    const std::size_t start = rest.find_first_not_of(" \t\r");
    if (start == std::string_view::npos) break;
    rest.remove_prefix(start);
    const std::size_t end = rest.find_first_of(" \t\r");
    const std::string_view token = rest.substr(0, end);
    rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
    const std::size_t comma = token.find(',');
    if (comma == std::string_view::npos) return std::nullopt;
    const auto x = parse_double(token.substr(0, comma));
    const auto y = parse_double(token.substr(comma + 1));
    if (!x || !y) return std::nullopt;
    vertices.push_back({*x, *y});
  }
  if (vertices.size() < 3) return std::nullopt;
  return Polygon{std::string(id), std::move(vertices)};
}

PolygonFile parse_polygons(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open polygon file: " + path.string());
  PolygonFile result;
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    if (auto pg = parse_polygon_line(line)) {
      result.polygons.push_back(std::move(*pg));
    } else {
      ++result.skipped;
    }
  }
  if (result.polygons.empty()) throw DataError("no valid polygons in file: " + path.string());
  return result;
}

void write_polygons(const std::filesystem::path& path, std::span<const Polygon> polygons) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write polygon file: " + path.string());
  out.precision(17);
  for (const auto& pg : polygons) {
    out << pg.id << ';';
    for (std::size_t i = 0; i < pg.vertices.size(); ++i) {
      if (i) out << ' ';
      out << pg.vertices[i].x << ',' << pg.vertices[i].y;
    }
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, std::span<const SpatialObject> objects) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write csv file: " + path.string());
  out.precision(17);
  out << "x,y,payload\n";
  for (const auto& o : objects) out << o.x << ',' << o.y << ',' << o.payload << '\n';
}

std::vector<SpatialObject> gen_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 1) throw InvalidArgument("synthetic n must be >= 1");
  const Rect& d = spec.domain;
  if (d.is_empty() || !is_finite(d.lo()) || !is_finite(d.hi())) {
    throw InvalidArgument("synthetic domain must be a valid rect");
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> ux(d.x_lo, d.x_hi);
  std::uniform_real_distribution<double> uy(d.y_lo, d.y_hi);
  std::vector<SpatialObject> out;
  out.reserve(spec.n);

  switch (spec.distribution) {
    case SyntheticSpec::Distribution::Uniform:
      for (std::uint64_t i = 0; i < spec.n; ++i) {
        const double x = ux(rng);
        const double y = uy(rng);
        out.push_back({0.0, x, y, i});
      }
      break;
    case SyntheticSpec::Distribution::Gaussian: {
      if (spec.clusters < 1) throw InvalidArgument("gaussian needs >= 1 cluster");
      if (!(spec.sigma > 0.0)) throw InvalidArgument("gaussian sigma must be > 0");
      std::vector<Point> centers(spec.clusters);
      for (auto& c : centers) {
        c.x = ux(rng);
        c.y = uy(rng);
      }
      std::uniform_int_distribution<std::uint32_t> pick(0, spec.clusters - 1);
      std::normal_distribution<double> noise(0.0, spec.sigma);
      for (std::uint64_t i = 0; i < spec.n; ++i) {
        const Point& c = centers[pick(rng)];
        const double x = std::clamp(c.x + noise(rng), d.x_lo, d.x_hi);
        const double y = std::clamp(c.y + noise(rng), d.y_lo, d.y_hi);
        out.push_back({0.0, x, y, i});
      }
      break;
    }
    case SyntheticSpec::Distribution::Skewed: {
      if (!(spec.zipf_s > 0.0)) throw InvalidArgument("zipf exponent must be > 0");
      constexpr std::size_t kRanks = 1000;
      std::vector<double> weights(kRanks);
      for (std::size_t r = 0; r < kRanks; ++r) {
        weights[r] = std::pow(static_cast<double>(r + 1), -spec.zipf_s);
      }
      std::discrete_distribution<std::size_t> rank(weights.begin(), weights.end());
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (std::uint64_t i = 0; i < spec.n; ++i) {
        const double t = (static_cast<double>(rank(rng)) + unit(rng)) / kRanks;
        const double x = std::min(d.x_hi, d.x_lo + t * d.width());
        const double y = uy(rng);
        out.push_back({0.0, x, y, i});
      }
      break;
    }
  }
  return out;
}

std::vector<Polygon> gen_polygons(std::size_t count, const Rect& domain, double mean_radius,
                                  std::uint64_t seed) {
  if (!(mean_radius > 0.0)) throw InvalidArgument("polygon radius must be > 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(domain.x_lo, domain.x_hi);
  std::uniform_real_distribution<double> uy(domain.y_lo, domain.y_hi);
  std::uniform_real_distribution<double> scale(0.5, 1.5);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> sides(3, 12);
  std::vector<Polygon> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Point c{ux(rng), uy(rng)};
    const double r = mean_radius * scale(rng);
    std::vector<double> angles(static_cast<std::size_t>(sides(rng)));
    for (auto& a : angles) a = angle(rng);
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
    std::vector<Point> vertices;
    for (double a : angles) vertices.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    if (vertices.size() < 3) {
      vertices = {{c.x - r, c.y - r}, {c.x + r, c.y - r}, {c.x, c.y + r}};
    }
    out.push_back({"pg" + std::to_string(i), std::move(vertices)});
  }
  return out;
}

SyntheticSpec parse_synthetic(std::string_view text) {
  const auto parts = split(text, ':');
  SyntheticSpec spec;
  const std::string_view kind = parts[0];
  if (kind == "uniform") {
    spec.distribution = SyntheticSpec::Distribution::Uniform;
  } else if (kind == "gaussian") {
    spec.distribution = SyntheticSpec::Distribution::Gaussian;
  } else if (kind == "skewed" || kind == "zipf") {
    spec.distribution = SyntheticSpec::Distribution::Skewed;
  } else {
    throw InvalidArgument("unknown distribution '" + std::string(kind) + "'");
  }
  auto number = [&](std::size_t i) {
    const auto v = parse_double(parts[i]);
    if (!v || *v <= 0.0) throw InvalidArgument("bad synthetic parameter '" + std::string(parts[i]) + "'");
    return *v;
  };
  if (parts.size() > 1) spec.n = static_cast<std::uint64_t>(number(1));
  if (spec.distribution == SyntheticSpec::Distribution::Gaussian) {
    if (parts.size() > 2) spec.clusters = static_cast<std::uint32_t>(number(2));
    if (parts.size() > 3) spec.sigma = number(3);
  } else if (spec.distribution == SyntheticSpec::Distribution::Skewed) {
    if (parts.size() > 2) spec.zipf_s = number(2);
  }
  if (spec.n < 1) throw InvalidArgument("synthetic n must be >= 1");
  return spec;
}

}  // namespace lilis

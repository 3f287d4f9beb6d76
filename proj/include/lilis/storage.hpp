#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lilis/dataset.hpp"

namespace lilis {

struct CsvSchema {
  char delimiter = ',';
  std::size_t x_column = 0;
  std::size_t y_column = 1;
  std::optional<std::size_t> payload_column;  // else the data-row ordinal
  bool has_header = true;
};

struct IngestResult {
  std::vector<SpatialObject> objects;  // keys unset until partitioning
  std::size_t skipped = 0;
};

/// Rows with missing or non-finite coordinates are skipped and counted. Numeric
/// payloads are kept as-is; any other payload text is hashed with string_to_key.
/// Throws DataError on a missing file or zero valid rows.
IngestResult ingest_csv(const std::filesystem::path& path, const CsvSchema& schema);

struct PolygonFile {
  std::vector<Polygon> polygons;
  std::size_t skipped = 0;
};

/// One polygon per line: `id;x1,y1 x2,y2 ...`. Blank lines are ignored; lines with
/// fewer than 3 valid vertices are skipped. Throws DataError when nothing parses.
PolygonFile parse_polygons(const std::filesystem::path& path);
/// Parse one polygon line; nullopt when it is malformed.
std::optional<Polygon> parse_polygon_line(std::string_view line);

void write_polygons(const std::filesystem::path& path, std::span<const Polygon> polygons);
void write_csv(const std::filesystem::path& path, std::span<const SpatialObject> objects);

struct SyntheticSpec {
  enum class Distribution { Uniform, Gaussian, Skewed };

  Distribution distribution = Distribution::Uniform;
  std::uint64_t n = 100000;
  Rect domain{0.0, 0.0, 1.0, 1.0};
  std::uint64_t seed = 42;
  std::uint32_t clusters = 8;  // Gaussian
  double sigma = 0.02;         // Gaussian, in domain units
  double zipf_s = 1.0;         // Skewed
};

/// Deterministic under (spec, seed). Payloads are the generation ordinal.
std::vector<SpatialObject> gen_synthetic(const SyntheticSpec& spec);

/// Random convex polygons (points on a jittered circle) centered inside `domain`.
std::vector<Polygon> gen_polygons(std::size_t count, const Rect& domain, double mean_radius,
                                  std::uint64_t seed);

/// Parse `uniform:N`, `gaussian:N[:clusters[:sigma]]` or `skewed:N[:s]`.
SyntheticSpec parse_synthetic(std::string_view text);

// LILIS1 snapshot. All integers and floats little-endian, fixed width.
inline constexpr char kSnapshotMagic[6] = {'L', 'I', 'L', 'I', 'S', '1'};
inline constexpr std::uint16_t kSnapshotVersion = 1;

std::string encode_snapshot(const PartitionedDataset& dataset);
/// Throws FormatError on bad magic, version mismatch, truncation or CRC mismatch.
PartitionedDataset decode_snapshot(std::string_view bytes);

void save_snapshot(const PartitionedDataset& dataset, const std::filesystem::path& path);
PartitionedDataset load_snapshot(const std::filesystem::path& path);

std::uint32_t crc32(std::string_view bytes);

}  // namespace lilis

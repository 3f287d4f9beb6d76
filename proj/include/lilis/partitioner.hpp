#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lilis/dataset.hpp"

namespace lilis {

/// Independent Bernoulli(rate) inclusion, seeded. An empty draw falls back to the
/// first min(1000, N) points.
std::vector<Point> sample(std::span<const SpatialObject> objects, double rate,
                          std::uint64_t seed);

/// Grid rectangles built over the sample, in deterministic id order. Grid-based,
/// Quadtree and KDTree cells tile the sample MBR; RTreeLeaves returns STR leaf MBRs.
std::vector<Rect> build_grids(std::span<const Point> sample, const PartitionStrategy& strategy);

/// Stretches every cell edge lying on `from`'s boundary out to `to`'s boundary, so
/// cells tiling `from` also cover `to`.
std::vector<Rect> stretch_to_cover(std::vector<Rect> grids, const Rect& from, const Rect& to);

/// Grid id per object: the first grid containing it, else grids.size() (overflow).
std::vector<std::uint32_t> locate(std::span<const SpatialObject> objects,
                                  std::span<const Rect> grids);

/// Routes every object to its grid, keys and sorts each partition, and fits a
/// SplineIndex per non-empty partition. The overflow partition is appended last.
PartitionedDataset assign(std::span<const SpatialObject> objects, std::span<const Rect> grids,
                          const KeyStrategy& key, int epsilon = SplineIndex::kDefaultEpsilon,
                          int radix_bits = SplineIndex::kDefaultRadixBits);

struct BuildOptions {
  std::optional<PartitionStrategy> strategy;  // default: KDTree sized to ~2x workers leaves
  KeyStrategy key = KeyStrategy::axis_x();    // ZOrder with an empty domain uses the data MBR
  int epsilon = SplineIndex::kDefaultEpsilon;
  int radix_bits = SplineIndex::kDefaultRadixBits;
  double sample_rate = 0.01;
  std::uint64_t seed = 42;
  std::uint32_t workers = 8;
};

/// KDTree whose leaf size yields about 2 * workers leaves over the sample.
PartitionStrategy default_strategy(std::size_t sample_size, std::uint32_t workers);

/// Positive-extent domain covering `mbr`, for ZOrder quantization.
Rect zorder_domain_for(const Rect& mbr);

/// The whole pipeline: sample, build grids, stretch (non-R-tree strategies), assign.
PartitionedDataset build_dataset(std::span<const SpatialObject> objects,
                                 const BuildOptions& options);

}  // namespace lilis

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lilis/geometry.hpp"

namespace lilis {

/// How a 2-D point is projected onto the 1-D sort key.
struct KeyStrategy {
  enum class Kind : std::uint8_t { AxisX = 0, AxisY = 1, ZOrder = 2 };

  Kind kind = Kind::AxisX;
  int bits_per_dim = 16;  // ZOrder only
  Rect domain{};          // ZOrder only

  static KeyStrategy axis_x() { return {Kind::AxisX, 16, {}}; }
  static KeyStrategy axis_y() { return {Kind::AxisY, 16, {}}; }
  /// Throws InvalidArgument unless bits in [1, 31] and domain has positive extent.
  static KeyStrategy zorder(int bits_per_dim, const Rect& domain);
  /// Domain left unset; build_dataset fits it to the data MBR.
  static KeyStrategy zorder(int bits_per_dim);

  friend bool operator==(const KeyStrategy&, const KeyStrategy&) = default;
};

const char* to_string(KeyStrategy::Kind kind);

/// Interleaves ix (even output bits) with iy (odd output bits).
std::uint64_t morton_encode(std::uint32_t ix, std::uint32_t iy, int bits);

/// Floor-quantizes a coordinate of [lo, hi] to [0, 2^bits - 1], clamping outside values.
std::uint32_t quantize(double v, double lo, double hi, int bits);

double project_key(Point p, const KeyStrategy& strategy);

/// Polynomial rolling hash over the bytes of `s` with multiplier 31, mod 2^64.
std::uint64_t string_to_key(std::string_view s);

struct SplineKnot {
  double key = 0.0;
  std::uint64_t position = 0;

  friend bool operator==(const SplineKnot&, const SplineKnot&) = default;
};

/// One-pass greedy corridor fit. `pairs` must have strictly increasing keys; the
/// result interpolates every input position to within `epsilon`.
std::vector<SplineKnot> build_spline(std::span<const SplineKnot> pairs, int epsilon);

/// Distinct keys of a sorted key array, each paired with its first position.
std::vector<SplineKnot> first_occurrences(std::span<const double> sorted_keys);

/// Flat table mapping 2^bits equal-width key slots to a range of knot indexes.
class RadixTable {
 public:
  RadixTable() = default;

  /// Requires >= 2 knots, 1 <= bits <= 30 and first key < last key.
  static RadixTable build(std::span<const SplineKnot> knots, int bits);

  /// Knot-index range [first, second] that holds the first knot with key >= k.
  std::pair<std::uint32_t, std::uint32_t> bounds(double key) const;

  int bits() const { return bits_; }
  double min_key() const { return min_key_; }
  double max_key() const { return max_key_; }
  double scale() const { return scale_; }
  const std::vector<std::uint32_t>& table() const { return table_; }

  /// Reassemble from persisted fields; validates the table shape.
  static RadixTable from_parts(int bits, double min_key, double max_key, double scale,
                               std::vector<std::uint32_t> table);

  friend bool operator==(const RadixTable&, const RadixTable&) = default;

 private:
  std::size_t slot(double key) const;

  int bits_ = 0;
  double min_key_ = 0.0;
  double max_key_ = 0.0;
  double scale_ = 0.0;
  std::vector<std::uint32_t> table_;
};

struct Prediction {
  double estimate = 0.0;
  std::size_t lo = 0;
  std::size_t hi = 0;
};

/// Error-bounded spline over one key-sorted array, with a radix table on top.
class SplineIndex {
 public:
  static constexpr int kDefaultEpsilon = 32;
  static constexpr int kDefaultRadixBits = 10;

  SplineIndex() = default;

  /// Fit over a non-empty, non-decreasing key array.
  static SplineIndex build(std::span<const double> sorted_keys, int epsilon = kDefaultEpsilon,
                           int radix_bits = kDefaultRadixBits);

  /// Reassemble from persisted fields (no refit).
  static SplineIndex from_parts(std::vector<SplineKnot> knots, int epsilon, std::size_t size,
                                std::optional<RadixTable> radix);

  Prediction predict(double key) const;

  /// Index j of the upper knot of the segment [j-1, j] bracketing `key`,
  /// located through the radix table. Returns 0 only for single-knot splines.
  std::size_t find_segment(double key) const;
  /// Same contract as `find_segment`, by plain binary search over all knots.
  std::size_t find_segment_binary(double key) const;

  const std::vector<SplineKnot>& knots() const { return knots_; }
  int epsilon() const { return epsilon_; }
  std::size_t size() const { return size_; }
  const std::optional<RadixTable>& radix() const { return radix_; }

  friend bool operator==(const SplineIndex&, const SplineIndex&) = default;

 private:
  std::size_t clamp_segment(std::size_t upper) const;

  std::vector<SplineKnot> knots_;
  int epsilon_ = kDefaultEpsilon;
  std::size_t size_ = 0;
  std::optional<RadixTable> radix_;
};

/// First index in [first, last) whose key is >= `key`, or `last`.
template <class KeyAt>
std::size_t lower_bound_between(std::size_t first, std::size_t last, double key, KeyAt&& key_at) {
  std::size_t count = last - first;
  while (count > 0) {
    const std::size_t half = count / 2;
    const std::size_t mid = first + half;
    if (key_at(mid) < key) {
      first = mid + 1;
      count -= half + 1;
    } else {
      count = half;
    }
  }
  return first;
}

/// First index in [0, n] whose key is >= `key`. The search starts inside the
/// predicted corridor [lo, hi] and gallops outward when the answer lies beyond it,
/// so the result is exact for any key, indexed or not.
template <class KeyAt>
std::size_t lower_bound_near(std::size_t n, double key, std::size_t lo, std::size_t hi,
                             KeyAt&& key_at) {
  if (n == 0) return 0;
  hi = std::min(hi, n - 1);
  lo = std::min(lo, hi);
  const std::size_t pos = lower_bound_between(lo, hi + 1, key, key_at);
  if (pos == lo && lo > 0 && key_at(lo - 1) >= key) {
    std::size_t bound = lo - 1;  // key_at(bound) >= key
    std::size_t step = 1;
    std::size_t left = 0;
    while (step <= bound) {
      const std::size_t cand = bound - step;
      if (key_at(cand) < key) {
        left = cand + 1;
        break;
      }
      bound = cand;
      step *= 2;
    }
    return lower_bound_between(left, bound, key, key_at);
  }
  if (pos == hi + 1 && hi + 1 < n && key_at(hi + 1) < key) {
    std::size_t bound = hi + 1;  // key_at(bound) < key
    std::size_t step = 1;
    std::size_t right = n;
    while (bound + step < n) {
      const std::size_t cand = bound + step;
      if (key_at(cand) >= key) {
        right = cand;
        break;
      }
      bound = cand;
      step *= 2;
    }
    return lower_bound_between(bound + 1, right, key, key_at);
  }
  return pos;
}

}  // namespace lilis

#include "lilis/learned_index.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "lilis/error.hpp"

namespace lilis {

KeyStrategy KeyStrategy::zorder(int bits_per_dim) {
  if (bits_per_dim < 1 || bits_per_dim > 31) {
    throw InvalidArgument("zorder bits_per_dim must be in [1, 31]");
  }
  return {Kind::ZOrder, bits_per_dim, Rect::empty()};
}

KeyStrategy KeyStrategy::zorder(int bits_per_dim, const Rect& domain) {
  zorder(bits_per_dim);
  if (domain.is_empty() || !(domain.width() > 0.0) || !(domain.height() > 0.0) ||
      !is_finite(domain.lo()) || !is_finite(domain.hi())) {
    throw InvalidArgument("zorder domain needs positive finite width and height");
  }
  return {Kind::ZOrder, bits_per_dim, domain};
}

const char* to_string(KeyStrategy::Kind kind) {
  switch (kind) {
    case KeyStrategy::Kind::AxisX: return "x";
    case KeyStrategy::Kind::AxisY: return "y";
    case KeyStrategy::Kind::ZOrder: return "zorder";
  }
  return "?";
}

namespace {

// Spreads the low 32 bits of v so bit i lands at bit 2i.
std::uint64_t spread_bits(std::uint64_t v) {
  v &= 0xffffffffULL;
  v = (v | (v << 16)) & 0x0000ffff0000ffffULL;
  v = (v | (v << 8)) & 0x00ff00ff00ff00ffULL;
  v = (v | (v << 4)) & 0x0f0f0f0f0f0f0f0fULL;
  v = (v | (v << 2)) & 0x3333333333333333ULL;
  v = (v | (v << 1)) & 0x5555555555555555ULL;
  return v;
}

}  // namespace

std::uint64_t morton_encode(std::uint32_t ix, std::uint32_t iy, int bits) {
  if (bits < 1 || bits > 32) throw InvalidArgument("morton bits must be in [1, 32]");
  const std::uint64_t limit = std::uint64_t{1} << bits;
  if (ix >= limit || iy >= limit) throw InvalidArgument("morton input out of range");
  return spread_bits(ix) | (spread_bits(iy) << 1);
}

std::uint32_t quantize(double v, double lo, double hi, int bits) {
  const std::uint64_t cells = std::uint64_t{1} << bits;
  const double t = (v - lo) / (hi - lo) * static_cast<double>(cells);
  if (!(t > 0.0)) return 0;
  if (t >= static_cast<double>(cells - 1)) {
    return static_cast<std::uint32_t>(std::min<double>(std::floor(t), cells - 1));
  }
  return static_cast<std::uint32_t>(t);
}

double project_key(Point p, const KeyStrategy& strategy) {
  if (!is_finite(p)) throw InvalidArgument("cannot project a non-finite point");
  switch (strategy.kind) {
    case KeyStrategy::Kind::AxisX: return p.x;
    case KeyStrategy::Kind::AxisY: return p.y;
    case KeyStrategy::Kind::ZOrder: {
      const Rect& d = strategy.domain;
      const int bits = strategy.bits_per_dim;
      const auto ix = quantize(p.x, d.x_lo, d.x_hi, bits);
      const auto iy = quantize(p.y, d.y_lo, d.y_hi, bits);
      return static_cast<double>(morton_encode(ix, iy, bits));
    }
  }
  return p.x;
}

std::uint64_t string_to_key(std::string_view s) {
  if (s.empty()) throw InvalidArgument("cannot hash an empty string");
  std::uint64_t h = 0;
  for (unsigned char c : s) h = h * 31 + c;
  return h;
}

std::vector<SplineKnot> first_occurrences(std::span<const double> sorted_keys) {
  std::vector<SplineKnot> pairs;
  for (std::size_t i = 0; i < sorted_keys.size(); ++i) {
    if (i == 0 || sorted_keys[i] != sorted_keys[i - 1]) {
      pairs.push_back({sorted_keys[i], i});
    }
  }
  return pairs;
}

std::vector<SplineKnot> build_spline(std::span<const SplineKnot> pairs, int epsilon) {
  if (epsilon < 1) throw InvalidArgument("spline epsilon must be >= 1");
  if (pairs.empty()) throw InvalidArgument("spline needs at least one (key, position) pair");
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (!(pairs[i - 1].key < pairs[i].key)) {
      throw InvalidArgument("spline keys must be strictly increasing");
    }
  }

  std::vector<SplineKnot> knots{pairs.front()};
  const double eps = epsilon;
  constexpr double inf = std::numeric_limits<double>::infinity();
  double upper = inf;
  double lower = -inf;

  for (std::size_t i = 1; i < pairs.size(); ++i) {
    const SplineKnot& base = knots.back();
    double dx = pairs[i].key - base.key;
    double dy = static_cast<double>(pairs[i].position) - static_cast<double>(base.position);
    const double slope = dy / dx;
    if (slope > upper || slope < lower) {
      // pairs[i] escapes the corridor: close the segment at the previous pair.
      knots.push_back(pairs[i - 1]);
      const SplineKnot& fresh = knots.back();
      dx = pairs[i].key - fresh.key;
      dy = static_cast<double>(pairs[i].position) - static_cast<double>(fresh.position);
      upper = (dy + eps) / dx;
      lower = (dy - eps) / dx;
    } else {
      upper = std::min(upper, (dy + eps) / dx);
      lower = std::max(lower, (dy - eps) / dx);
    }
  }
  if (knots.back().key != pairs.back().key) knots.push_back(pairs.back());
  return knots;
}

RadixTable RadixTable::build(std::span<const SplineKnot> knots, int bits) {
  if (bits < 1 || bits > 30) throw InvalidArgument("radix bits must be in [1, 30]");
  if (knots.size() < 2) throw InvalidArgument("radix table needs at least two knots");
  RadixTable t;
  t.bits_ = bits;
  t.min_key_ = knots.front().key;
  t.max_key_ = knots.back().key;
  if (!(t.min_key_ < t.max_key_)) {
    throw InvalidArgument("radix table needs distinct first and last knot keys");
  }
  const std::size_t slots = std::size_t{1} << bits;
  t.scale_ = static_cast<double>(slots) / (t.max_key_ - t.min_key_);
  t.table_.assign(slots + 2, 0);

  std::size_t prev = 0;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const std::size_t curr = t.slot(knots[i].key);
    for (std::size_t j = prev + 1; j <= curr; ++j) t.table_[j] = static_cast<std::uint32_t>(i);
    prev = std::max(prev, curr);
  }
  const auto last = static_cast<std::uint32_t>(knots.size() - 1);
  for (; prev < t.table_.size() - 1; ++prev) t.table_[prev + 1] = last;
  return t;
}

RadixTable RadixTable::from_parts(int bits, double min_key, double max_key, double scale,
                                  std::vector<std::uint32_t> table) {
  if (bits < 1 || bits > 30) throw InvalidArgument("radix bits must be in [1, 30]");
  if (table.size() != (std::size_t{1} << bits) + 2) {
    throw InvalidArgument("radix table length does not match its bit count");
  }
  RadixTable t;
  t.bits_ = bits;
  t.min_key_ = min_key;
  t.max_key_ = max_key;
  t.scale_ = scale;
  t.table_ = std::move(table);
  return t;
}

std::size_t RadixTable::slot(double key) const {
  const double s = (key - min_key_) * scale_;
  if (!(s > 0.0)) return 0;
  const auto cap = static_cast<double>(std::size_t{1} << bits_);
  if (s >= cap) return static_cast<std::size_t>(cap);
  return static_cast<std::size_t>(s);
}

std::pair<std::uint32_t, std::uint32_t> RadixTable::bounds(double key) const {
  const std::size_t s = slot(key);
  return {table_[s], table_[s + 1]};
}

SplineIndex SplineIndex::build(std::span<const double> sorted_keys, int epsilon,
                               int radix_bits) {
  if (sorted_keys.empty()) throw InvalidArgument("cannot index an empty key array");
  for (std::size_t i = 1; i < sorted_keys.size(); ++i) {
    if (sorted_keys[i] < sorted_keys[i - 1]) {
      throw InvalidArgument("index keys must be sorted");
    }
  }
  const auto pairs = first_occurrences(sorted_keys);
  SplineIndex idx;
  idx.knots_ = build_spline(pairs, epsilon);
  idx.epsilon_ = epsilon;
  idx.size_ = sorted_keys.size();
  if (idx.knots_.size() >= 2) idx.radix_ = RadixTable::build(idx.knots_, radix_bits);
  return idx;
}

SplineIndex SplineIndex::from_parts(std::vector<SplineKnot> knots, int epsilon,
                                    std::size_t size, std::optional<RadixTable> radix) {
  if (knots.empty() || size == 0) throw InvalidArgument("spline index needs knots and data");
  if (epsilon < 1) throw InvalidArgument("spline epsilon must be >= 1");
  if (knots.size() >= 2 && !radix) throw InvalidArgument("multi-knot spline needs a radix table");
  SplineIndex idx;
  idx.knots_ = std::move(knots);
  idx.epsilon_ = epsilon;
  idx.size_ = size;
  idx.radix_ = std::move(radix);
  return idx;
}

std::size_t SplineIndex::clamp_segment(std::size_t upper) const {
  if (upper == 0) return 1;
  return std::min(upper, knots_.size() - 1);
}

std::size_t SplineIndex::find_segment(double key) const {
  if (knots_.size() < 2) return 0;
  const auto [first, last] = radix_->bounds(key);
  const std::size_t end = std::min<std::size_t>(last + 1, knots_.size());
  const std::size_t j =
      lower_bound_between(first, end, key, [this](std::size_t i) { return knots_[i].key; });
  return clamp_segment(j);
}

std::size_t SplineIndex::find_segment_binary(double key) const {
  if (knots_.size() < 2) return 0;
  const std::size_t j = lower_bound_between(0, knots_.size(), key,
                                            [this](std::size_t i) { return knots_[i].key; });
  return clamp_segment(j);
}

Prediction SplineIndex::predict(double key) const {
  double estimate = 0.0;
  if (knots_.size() == 1 || key <= knots_.front().key) {
    estimate = static_cast<double>(knots_.front().position);
  } else if (key >= knots_.back().key) {
    estimate = static_cast<double>(knots_.back().position);
  } else {
    const std::size_t j = find_segment(key);
    const SplineKnot& a = knots_[j - 1];
    const SplineKnot& b = knots_[j];
    const double t = (key - a.key) / (b.key - a.key);
    estimate = static_cast<double>(a.position) +
               t * (static_cast<double>(b.position) - static_cast<double>(a.position));
  }
  const auto eps = static_cast<long long>(epsilon_);
  const auto last = static_cast<long long>(size_) - 1;
  const long long lo = std::max(0LL, static_cast<long long>(std::floor(estimate)) - eps);
  const long long hi = std::min(last, static_cast<long long>(std::ceil(estimate)) + eps);
  return {estimate, static_cast<std::size_t>(lo), static_cast<std::size_t>(std::max(lo, hi))};
}

}  // namespace lilis

#include "lilis/geometry.hpp"

#include <algorithm>
#include <utility>

#include "lilis/error.hpp"

namespace lilis {

bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

Rect make_rect(double x_lo, double y_lo, double x_hi, double y_hi) {
  if (!std::isfinite(x_lo) || !std::isfinite(y_lo) || !std::isfinite(x_hi) ||
      !std::isfinite(y_hi)) {
    throw InvalidArgument("rect coordinates must be finite");
  }
  if (x_lo > x_hi || y_lo > y_hi) {
    throw InvalidArgument("rect requires lo <= hi on both axes");
  }
  return {x_lo, y_lo, x_hi, y_hi};
}

Polygon make_polygon(std::string id, std::vector<Point> vertices) {
  if (vertices.size() < 3) {
    throw InvalidArgument("polygon '" + id + "' needs at least 3 vertices");
  }
  for (const Point& v : vertices) {
    if (!is_finite(v)) throw InvalidArgument("polygon '" + id + "' has a non-finite vertex");
  }
  return {std::move(id), std::move(vertices)};
}

Circle make_circle(Point center, double radius) {
  if (!is_finite(center)) throw InvalidArgument("circle center must be finite");
  if (!std::isfinite(radius) || radius < 0.0) {
    throw InvalidArgument("circle radius must be finite and >= 0");
  }
  return {center, radius};
}

namespace {

// p lies on the closed segment [a, b].
bool on_segment(Point a, Point b, Point p) {
  const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  if (cross != 0.0) return false;
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace

bool point_in_polygon(const Polygon& pg, Point p) {
  const auto& v = pg.vertices;
  const std::size_t n = v.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = v[j];
    const Point b = v[i];
    if (on_segment(a, b, p)) return true;
    // Half-open rule on y so a vertex shared by two edges is counted once.
    if ((b.y > p.y) != (a.y > p.y)) {
      const double x_cross = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

Rect polygon_mbr(const Polygon& pg) { return points_mbr(pg.vertices); }

Rect circle_mbr(const Circle& c) {
  return {c.center.x - c.radius, c.center.y - c.radius, c.center.x + c.radius,
          c.center.y + c.radius};
}

Rect points_mbr(std::span<const Point> points) {
  Rect r = Rect::empty();
  for (const Point& p : points) r.expand(p);
  return r;
}

}  // namespace lilis

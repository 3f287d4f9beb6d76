#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace lilis {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Closed axis-aligned rectangle. `Rect::empty()` is the identity for `expand`
/// and is the only rect allowed to violate lo <= hi.
struct Rect {
  double x_lo = 0.0;
  double y_lo = 0.0;
  double x_hi = 0.0;
  double y_hi = 0.0;

  static constexpr Rect empty() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {inf, inf, -inf, -inf};
  }
  static constexpr Rect around(Point p) { return {p.x, p.y, p.x, p.y}; }

  bool is_empty() const { return !(x_lo <= x_hi && y_lo <= y_hi); }
  double width() const { return x_hi - x_lo; }
  double height() const { return y_hi - y_lo; }
  double area() const { return is_empty() ? 0.0 : width() * height(); }
  Point lo() const { return {x_lo, y_lo}; }
  Point hi() const { return {x_hi, y_hi}; }

  void expand(Point p) {
    x_lo = std::min(x_lo, p.x);
    y_lo = std::min(y_lo, p.y);
    x_hi = std::max(x_hi, p.x);
    y_hi = std::max(y_hi, p.y);
  }
  void expand(const Rect& r) {
    x_lo = std::min(x_lo, r.x_lo);
    y_lo = std::min(y_lo, r.y_lo);
    x_hi = std::max(x_hi, r.x_hi);
    y_hi = std::max(y_hi, r.y_hi);
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

struct Circle {
  Point center;
  double radius = 0.0;
};

struct Polygon {
  std::string id;
  std::vector<Point> vertices;  // implicitly closed
};

bool is_finite(Point p);

/// Throws InvalidArgument unless the rect has finite corners with lo <= hi.
Rect make_rect(double x_lo, double y_lo, double x_hi, double y_hi);
/// Throws InvalidArgument on < 3 vertices or non-finite coordinates.
Polygon make_polygon(std::string id, std::vector<Point> vertices);
/// Throws InvalidArgument on a negative or non-finite radius.
Circle make_circle(Point center, double radius);

inline bool rect_contains_point(const Rect& r, Point p) {
  return r.x_lo <= p.x && p.x <= r.x_hi && r.y_lo <= p.y && p.y <= r.y_hi;
}

inline bool rect_intersects(const Rect& a, const Rect& b) {
  return a.x_lo <= b.x_hi && b.x_lo <= a.x_hi && a.y_lo <= b.y_hi && b.y_lo <= a.y_hi;
}

inline bool rect_envelops(const Rect& outer, const Rect& inner) {
  return outer.x_lo <= inner.x_lo && inner.x_hi <= outer.x_hi && outer.y_lo <= inner.y_lo &&
         inner.y_hi <= outer.y_hi;
}

inline double distance(Point p, Point q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// Even-odd ray casting. Points on an edge or vertex are contained.
bool point_in_polygon(const Polygon& pg, Point p);

Rect polygon_mbr(const Polygon& pg);
Rect circle_mbr(const Circle& c);
Rect points_mbr(std::span<const Point> points);

}  // namespace lilis

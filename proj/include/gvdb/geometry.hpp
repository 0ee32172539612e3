#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace gvdb {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
  Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
  Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Closed axis-aligned rectangle. A default-constructed Rect is empty
/// (min > max) and acts as the identity for `expand`.
struct Rect {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  friend bool operator==(const Rect&, const Rect&) = default;

  static Rect of_point(const Point& p) { return {p.x, p.y, p.x, p.y}; }

  static Rect of_segment(const Point& a, const Point& b) {
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x),
            std::max(a.y, b.y)};
  }

  bool empty() const { return min_x > max_x || min_y > max_y; }
  double width() const { return empty() ? 0.0 : max_x - min_x; }
  double height() const { return empty() ? 0.0 : max_y - min_y; }
  double area() const { return width() * height(); }
  Point center() const { return {(min_x + max_x) / 2, (min_y + max_y) / 2}; }

  void expand(const Point& p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }

  void expand(const Rect& r) {
    if (r.empty()) return;
    min_x = std::min(min_x, r.min_x);
    min_y = std::min(min_y, r.min_y);
    max_x = std::max(max_x, r.max_x);
    max_y = std::max(max_y, r.max_y);
  }

  Rect padded(double margin) const {
    return {min_x - margin, min_y - margin, max_x + margin, max_y + margin};
  }

  Rect translated(const Point& d) const {
    return {min_x + d.x, min_y + d.y, max_x + d.x, max_y + d.y};
  }

  bool contains(const Point& p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }

  bool contains(const Rect& r) const {
    return r.min_x >= min_x && r.max_x <= max_x && r.min_y >= min_y &&
           r.max_y <= max_y;
  }

  /// Closed intersection: touching boundaries count.
  bool intersects(const Rect& r) const {
    return min_x <= r.max_x && r.min_x <= max_x && min_y <= r.max_y &&
           r.min_y <= max_y;
  }

  /// Open intersection: the interiors share an area.
  bool interiors_intersect(const Rect& r) const {
    return min_x < r.max_x && r.min_x < max_x && min_y < r.max_y &&
           r.min_y < max_y;
  }
};

/// Signed area of the parallelogram (b - a) x (c - a).
inline double orient(const Point& a, const Point& b, const Point& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

/// Exact test whether the closed segment [a, b] meets the closed rectangle.
///
/// Separating-axis form: the bounding boxes must overlap, and the four
/// rectangle corners must not all lie strictly on one side of the line
/// through the segment.
inline bool segment_intersects_rect(const Point& a, const Point& b,
                                    const Rect& r) {
  if (!Rect::of_segment(a, b).intersects(r)) return false;
  if (r.contains(a) || r.contains(b)) return true;
  const double c0 = orient(a, b, {r.min_x, r.min_y});
  const double c1 = orient(a, b, {r.max_x, r.min_y});
  const double c2 = orient(a, b, {r.max_x, r.max_y});
  const double c3 = orient(a, b, {r.min_x, r.max_y});
  const bool all_pos = c0 > 0 && c1 > 0 && c2 > 0 && c3 > 0;
  const bool all_neg = c0 < 0 && c1 < 0 && c2 < 0 && c3 < 0;
  return !(all_pos || all_neg);
}

}  // namespace gvdb

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <compare>

namespace frameplan {

/// Integer canvas coordinates. Poses anchor an object's bounding-box top-left corner.
struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

struct Size {
  int width = 0;
  int height = 0;
  friend bool operator==(const Size&, const Size&) = default;
};

struct Box {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  std::int64_t area() const { return std::int64_t{w} * h; }
  int right() const { return x + w; }
  int bottom() const { return y + h; }
  Point center() const { return {x + w / 2, y + h / 2}; }
  bool contains(Point p) const { return p.x >= x && p.x < right() && p.y >= y && p.y < bottom(); }
  bool within(Size canvas) const {
    return x >= 0 && y >= 0 && right() <= canvas.width && bottom() <= canvas.height;
  }
  friend bool operator==(const Box&, const Box&) = default;
};

inline std::int64_t intersection_area(const Box& a, const Box& b) {
  const int w = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const int h = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (w <= 0 || h <= 0) return 0;
  return std::int64_t{w} * h;
}

/// Fraction of `subject` covered by `region`, in [0, 1].
inline double coverage(const Box& subject, const Box& region) {
  if (subject.area() <= 0) return 0.0;
  return static_cast<double>(intersection_area(subject, region)) /
         static_cast<double>(subject.area());
}

inline bool in_canvas(Point p, Size canvas) {
  return p.x >= 0 && p.y >= 0 && p.x < canvas.width && p.y < canvas.height;
}

/// Sub-pixel drag coordinates round half-up onto the integer grid.
inline int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

}  // namespace frameplan

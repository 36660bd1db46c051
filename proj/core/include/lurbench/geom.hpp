#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace lur {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::sqrt(x * x + y * y); }
  bool operator==(const Vec2&) const = default;
};

using Polyline = std::vector<Vec2>;
using Polygon = std::vector<Vec2>;

inline double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

inline double dist_point_polyline(const Vec2& p, const Polyline& line) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < line.size(); ++i) {
    best = std::min(best, dist_point_segment(p, line[i], line[i + 1]));
  }
  return best;
}

// Even-odd rule.
inline bool point_in_polygon(const Vec2& p, const Polygon& poly) {
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

inline double dist_point_polygon_boundary(const Vec2& p, const Polygon& poly) {
  double best = std::numeric_limits<double>::infinity();
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    best = std::min(best, dist_point_segment(p, poly[j], poly[i]));
  }
  return best;
}

// 0 inside the polygon, boundary distance outside.
inline double dist_point_polygon(const Vec2& p, const Polygon& poly) {
  if (point_in_polygon(p, poly)) return 0.0;
  return dist_point_polygon_boundary(p, poly);
}

// Signed shoelace area (positive for counter-clockwise).
inline double polygon_signed_area(const Polygon& poly) {
  double s = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    s += poly[j].x * poly[i].y - poly[i].x * poly[j].y;
  }
  return 0.5 * s;
}

inline double polygon_area(const Polygon& poly) {
  return std::abs(polygon_signed_area(poly));
}

struct Rect {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  bool intersects(const Rect& o) const {
    return min_x <= o.max_x && o.min_x <= max_x && min_y <= o.max_y &&
           o.min_y <= max_y;
  }
  Rect expanded(double m) const {
    return {min_x - m, min_y - m, max_x + m, max_y + m};
  }
};

inline Rect bounds_of(const std::vector<Vec2>& pts) {
  Rect r{std::numeric_limits<double>::infinity(),
         std::numeric_limits<double>::infinity(),
         -std::numeric_limits<double>::infinity(),
         -std::numeric_limits<double>::infinity()};
  for (const auto& p : pts) {
    r.min_x = std::min(r.min_x, p.x);
    r.min_y = std::min(r.min_y, p.y);
    r.max_x = std::max(r.max_x, p.x);
    r.max_y = std::max(r.max_y, p.y);
  }
  return r;
}

// Length of the part of segment [a,b] that lies inside the disk of radius r
// around c. Solves the quadratic |a + t(b-a) - c|^2 = r^2 for the parameter
// interval.
inline double segment_length_in_disk(const Vec2& a, const Vec2& b,
                                     const Vec2& c, double r) {
  const Vec2 d = b - a;
  const Vec2 f = a - c;
  const double A = d.dot(d);
  if (A == 0.0) return 0.0;
  const double B = 2.0 * f.dot(d);
  const double C = f.dot(f) - r * r;
  const double disc = B * B - 4.0 * A * C;
  if (disc <= 0.0) return 0.0;
  const double sq = std::sqrt(disc);
  const double t0 = std::clamp((-B - sq) / (2.0 * A), 0.0, 1.0);
  const double t1 = std::clamp((-B + sq) / (2.0 * A), 0.0, 1.0);
  return (t1 - t0) * std::sqrt(A);
}

// Sutherland-Hodgman clip of an arbitrary simple polygon against a convex
// clip polygon (counter-clockwise). Degenerate bridge edges produced for
// concave subjects carry zero area and do not disturb the shoelace result.
inline Polygon clip_polygon_convex(const Polygon& subject,
                                   const Polygon& clip_ccw) {
  Polygon out = subject;
  const size_t m = clip_ccw.size();
  for (size_t i = 0; i < m && !out.empty(); ++i) {
    const Vec2& ca = clip_ccw[i];
    const Vec2& cb = clip_ccw[(i + 1) % m];
    const Vec2 edge = cb - ca;
    auto is_inside = [&](const Vec2& p) {
      return edge.x * (p.y - ca.y) - edge.y * (p.x - ca.x) >= 0.0;
    };
    auto intersect = [&](const Vec2& p, const Vec2& q) {
      const Vec2 pq = q - p;
      const double denom = edge.x * pq.y - edge.y * pq.x;
      const double t =
          (edge.x * (ca.y - p.y) - edge.y * (ca.x - p.x)) / denom;
      return p + pq * t;
    };
    Polygon in;
    in.swap(out);
    for (size_t j = 0; j < in.size(); ++j) {
      const Vec2& cur = in[j];
      const Vec2& prev = in[(j + in.size() - 1) % in.size()];
      const bool cur_in = is_inside(cur);
      const bool prev_in = is_inside(prev);
      if (cur_in) {
        if (!prev_in) out.push_back(intersect(prev, cur));
        out.push_back(cur);
      } else if (prev_in) {
        out.push_back(intersect(prev, cur));
      }
    }
  }
  return out;
}

// Regular n-gon approximation of a disk, counter-clockwise.
inline Polygon disk_polygon(const Vec2& c, double r, int n = 512) {
  Polygon poly;
  poly.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * 3.14159265358979323846 * i / n;
    poly.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return poly;
}

// Intersection point of two segments, if any.
inline bool segment_intersection(const Vec2& a, const Vec2& b, const Vec2& c,
                                 const Vec2& d, Vec2* out) {
  const Vec2 r = b - a;
  const Vec2 s = d - c;
  const double denom = r.x * s.y - r.y * s.x;
  if (denom == 0.0) return false;
  const Vec2 ca = c - a;
  const double t = (ca.x * s.y - ca.y * s.x) / denom;
  const double u = (ca.x * r.y - ca.y * r.x) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return false;
  if (out) *out = a + r * t;
  return true;
}

}  // namespace lur

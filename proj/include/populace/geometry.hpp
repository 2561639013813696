#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace populace {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr bool operator==(const Vec2&) const = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr bool operator==(const Vec3&) const = default;
  constexpr Vec2 xy() const { return {x, y}; }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double norm(Vec3 v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
/// Counter-clockwise quarter turn.
constexpr Vec2 perp(Vec2 v) { return {-v.y, v.x}; }
inline Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}
/// Expresses `v` in the frame whose +x axis is the unit vector `forward`.
constexpr Vec2 to_local(Vec2 v, Vec2 forward) { return {dot(v, forward), cross(forward, v)}; }
constexpr Vec2 from_local(Vec2 v, Vec2 forward) {
  return {forward.x * v.x - forward.y * v.y, forward.y * v.x + forward.x * v.y};
}
inline std::optional<Vec2> normalized(Vec2 v, double eps = 1e-12) {
  const double n = norm(v);
  if (n < eps) return std::nullopt;
  return v / n;
}
inline Vec2 heading_vector(double yaw) { return {std::cos(yaw), std::sin(yaw)}; }
/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0) a += 2.0 * kPi;
  return a - kPi;
}
/// Unsigned angle between two nonzero vectors, in radians.
inline double angle_between(Vec2 a, Vec2 b) { return std::abs(std::atan2(cross(a, b), dot(a, b))); }

struct Aabb2 {
  Vec2 min{};
  Vec2 max{};

  bool empty() const { return max.x < min.x || max.y < min.y; }
  void expand(Vec2 p);
  static Aabb2 none() { return {{1e300, 1e300}, {-1e300, -1e300}}; }
};

/// Convex polygon with counter-clockwise vertices.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;
  /// Vertices must already be convex; orientation is normalized to CCW.
  explicit ConvexPolygon(std::vector<Vec2> vertices);

  /// Axis-aligned rectangle in the frame given by `origin` and unit `forward`.
  static ConvexPolygon rectangle(Vec2 origin, Vec2 forward, double f_min, double f_max, double l_min,
                                 double l_max);

  const std::vector<Vec2>& vertices() const& { return vertices_; }
  std::vector<Vec2> vertices() && { return std::move(vertices_); }
  std::size_t size() const { return vertices_.size(); }
  bool degenerate() const;
  double area() const;
  Vec2 centroid() const;
  Aabb2 bounds() const;
  /// Closed containment with tolerance `eps` on the boundary.
  bool contains(Vec2 p, double eps = 1e-9) const;

 private:
  std::vector<Vec2> vertices_;
};

/// Signed area (positive when CCW).
double signed_area(std::span<const Vec2> ring);
std::vector<Vec2> convex_hull(std::vector<Vec2> points);
/// Intersection of two convex polygons; empty when they do not overlap with positive area.
std::optional<ConvexPolygon> clip_convex(const ConvexPolygon& subject, const ConvexPolygon& clip);
bool convex_intersect(const ConvexPolygon& a, const ConvexPolygon& b);
/// Minimum Euclidean distance between two convex regions (0 when they touch or overlap).
double convex_distance(const ConvexPolygon& a, const ConvexPolygon& b);
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Simple (possibly non-convex) polygon, used for floor outlines.
class SimplePolygon {
 public:
  SimplePolygon() = default;
  explicit SimplePolygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {}

  const std::vector<Vec2>& vertices() const& { return vertices_; }
  std::vector<Vec2> vertices() && { return std::move(vertices_); }
  double area() const;
  Aabb2 bounds() const;
  bool contains(Vec2 p) const;
  /// Distance from `p` to the nearest boundary edge.
  double boundary_distance(Vec2 p) const;

 private:
  std::vector<Vec2> vertices_;
};

}  // namespace populace

#include "populace/geometry.hpp"

#include <algorithm>
#include <limits>

namespace populace {

void Aabb2::expand(Vec2 p) {
  min.x = std::min(min.x, p.x);
  min.y = std::min(min.y, p.y);
  max.x = std::max(max.x, p.x);
  max.y = std::max(max.y, p.y);
}

double signed_area(std::span<const Vec2> ring) {
  double twice = 0.0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) twice += cross(ring[i], ring[(i + 1) % n]);
  return 0.5 * twice;
}

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (signed_area(vertices_) < 0) std::reverse(vertices_.begin(), vertices_.end());
}

ConvexPolygon ConvexPolygon::rectangle(Vec2 origin, Vec2 forward, double f_min, double f_max,
                                       double l_min, double l_max) {
  auto at = [&](double f, double l) { return origin + from_local({f, l}, forward); };
  return ConvexPolygon({at(f_min, l_min), at(f_max, l_min), at(f_max, l_max), at(f_min, l_max)});
}

bool ConvexPolygon::degenerate() const { return vertices_.size() < 3 || area() < 1e-12; }

double ConvexPolygon::area() const { return std::abs(signed_area(vertices_)); }

Vec2 ConvexPolygon::centroid() const {
  const double a = signed_area(vertices_);
  if (std::abs(a) < 1e-15) {
    Vec2 mean{};
    for (const auto& v : vertices_) mean += v;
    return vertices_.empty() ? mean : mean / static_cast<double>(vertices_.size());
  }
  Vec2 c{};
  for (std::size_t i = 0, n = vertices_.size(); i < n; ++i) {
    const Vec2 p = vertices_[i], q = vertices_[(i + 1) % n];
    c += (p + q) * cross(p, q);
  }
  return c / (6.0 * a);
}

Aabb2 ConvexPolygon::bounds() const {
  Aabb2 box = Aabb2::none();
  for (const auto& v : vertices_) box.expand(v);
  return box;
}

bool ConvexPolygon::contains(Vec2 p, double eps) const {
  const std::size_t n = vertices_.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices_[i], b = vertices_[(i + 1) % n];
    const Vec2 edge = b - a;
    const double len = norm(edge);
    if (len < 1e-15) continue;
    if (cross(edge, p - a) / len < -eps) return false;
  }
  return true;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> points) {
  std::sort(points.begin(), points.end(),
            [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;
  std::vector<Vec2> hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    const Vec2 p = points[i];
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

std::optional<ConvexPolygon> clip_convex(const ConvexPolygon& subject, const ConvexPolygon& clip) {
  std::vector<Vec2> out = subject.vertices();
  const auto& cv = clip.vertices();
  for (std::size_t i = 0, n = cv.size(); i < n && !out.empty(); ++i) {
    const Vec2 a = cv[i], b = cv[(i + 1) % n];
    const Vec2 edge = b - a;
    std::vector<Vec2> in = std::move(out);
    out.clear();
    for (std::size_t j = 0, m = in.size(); j < m; ++j) {
      const Vec2 p = in[j], q = in[(j + 1) % m];
      const double sp = cross(edge, p - a), sq = cross(edge, q - a);
      if (sp >= 0) out.push_back(p);
      if ((sp >= 0) != (sq >= 0)) {
        const double t = sp / (sp - sq);
        out.push_back(p + (q - p) * t);
      }
    }
  }
  std::vector<Vec2> cleaned;
  for (const auto& p : out) {
    if (cleaned.empty() || distance(cleaned.back(), p) > 1e-12) cleaned.push_back(p);
  }
  while (cleaned.size() > 1 && distance(cleaned.front(), cleaned.back()) <= 1e-12) cleaned.pop_back();
  ConvexPolygon result(std::move(cleaned));
  if (result.degenerate()) return std::nullopt;
  return result;
}

namespace {

bool separated_along_edges(const ConvexPolygon& a, const ConvexPolygon& b) {
  const auto& av = a.vertices();
  for (std::size_t i = 0, n = av.size(); i < n; ++i) {
    const Vec2 edge = av[(i + 1) % n] - av[i];
    bool all_outside = true;
    for (const auto& p : b.vertices()) {
      if (cross(edge, p - av[i]) >= 0) {
        all_outside = false;
        break;
      }
    }
    if (all_outside) return true;
  }
  return false;
}

}  // namespace

bool convex_intersect(const ConvexPolygon& a, const ConvexPolygon& b) {
  if (a.size() < 3 || b.size() < 3) return false;
  return !separated_along_edges(a, b) && !separated_along_edges(b, a);
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + ab * t);
}

double convex_distance(const ConvexPolygon& a, const ConvexPolygon& b) {
  if (convex_intersect(a, b)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  auto scan = [&best](const ConvexPolygon& points, const ConvexPolygon& edges) {
    const auto& ev = edges.vertices();
    for (const auto& p : points.vertices()) {
      for (std::size_t i = 0, n = ev.size(); i < n; ++i) {
        best = std::min(best, point_segment_distance(p, ev[i], ev[(i + 1) % n]));
      }
    }
  };
  scan(a, b);
  scan(b, a);
  return best;
}

double SimplePolygon::area() const { return std::abs(signed_area(vertices_)); }

Aabb2 SimplePolygon::bounds() const {
  Aabb2 box = Aabb2::none();
  for (const auto& v : vertices_) box.expand(v);
  return box;
}

bool SimplePolygon::contains(Vec2 p) const {
  bool inside = false;
  for (std::size_t i = 0, n = vertices_.size(), j = n - 1; i < n; j = i++) {
    const Vec2 a = vertices_[i], b = vertices_[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

double SimplePolygon::boundary_distance(Vec2 p) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, n = vertices_.size(); i < n; ++i) {
    best = std::min(best, point_segment_distance(p, vertices_[i], vertices_[(i + 1) % n]));
  }
  return best;
}

}  // namespace populace

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace cad2gis {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

using Point2 = Vec2<double>;
using Box2 = Eigen::AlignedBox<double, 2>;

// Exact coordinate equality.
inline bool same_point(const Point2& a, const Point2& b) {
  return a.x() == b.x() && a.y() == b.y();
}

// Lexicographic (x, then y) order; used wherever output order must not depend on input order.
inline bool lex_less(const Point2& a, const Point2& b) {
  return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
}

template <typename Scalar>
Scalar cross2(const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Distance from p to the infinite line through a and b. Falls back to |p - a| when a == b.
template <typename Scalar>
Scalar line_distance(const Vec2<Scalar>& p, const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  const Vec2<Scalar> d = b - a;
  const Scalar len = d.norm();
  if (len == Scalar(0)) return (p - a).norm();
  return std::abs(cross2<Scalar>(d, p - a)) / len;
}

template <typename Scalar>
Scalar point_segment_distance(const Vec2<Scalar>& p, const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  const Vec2<Scalar> d = b - a;
  const Scalar len2 = d.squaredNorm();
  if (len2 == Scalar(0)) return (p - a).norm();
  Scalar t = d.dot(p - a) / len2;
  t = std::clamp(t, Scalar(0), Scalar(1));
  return (a + t * d - p).norm();
}

template <typename Scalar>
Scalar polyline_distance(const Vec2<Scalar>& p, std::span<const Vec2<Scalar>> vertices) {
  if (vertices.size() == 1) return (p - vertices[0]).norm();
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    best = std::min(best, point_segment_distance<Scalar>(p, vertices[i], vertices[i + 1]));
  }
  return best;
}

template <typename Scalar>
Scalar polyline_length(std::span<const Vec2<Scalar>> vertices) {
  Scalar total(0);
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) total += (vertices[i + 1] - vertices[i]).norm();
  return total;
}

// Rings are closed vertex lists (first == last).

// Positive for counter-clockwise rings. Evaluated relative to the first vertex to limit cancellation.
template <typename Scalar>
Scalar signed_area(std::span<const Vec2<Scalar>> ring) {
  if (ring.size() < 4) return Scalar(0);
  const Vec2<Scalar> origin = ring.front();
  Scalar twice(0);
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    twice += cross2<Scalar>(ring[i] - origin, ring[i + 1] - origin);
  }
  return twice / Scalar(2);
}

// Area-weighted centroid of a simple ring. Undefined for zero-area rings; check signed_area first.
template <typename Scalar>
Vec2<Scalar> area_centroid(std::span<const Vec2<Scalar>> ring) {
  const Vec2<Scalar> origin = ring.front();
  Scalar twice(0);
  Vec2<Scalar> acc = Vec2<Scalar>::Zero();
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const Vec2<Scalar> a = ring[i] - origin;
    const Vec2<Scalar> b = ring[i + 1] - origin;
    const Scalar c = cross2<Scalar>(a, b);
    twice += c;
    acc += (a + b) * c;
  }
  return origin + acc / (Scalar(3) * twice);
}

// Mean of the distinct ring vertices (closing vertex excluded).
template <typename Scalar>
Vec2<Scalar> vertex_mean(std::span<const Vec2<Scalar>> ring) {
  std::size_t n = ring.size();
  if (n > 1 && ring.front() == ring.back()) --n;
  Vec2<Scalar> acc = Vec2<Scalar>::Zero();
  for (std::size_t i = 0; i < n; ++i) acc += ring[i];
  return acc / Scalar(n);
}

// Even-odd rule; boundary points may land on either side, callers combine with boundary distance.
template <typename Scalar>
bool point_in_ring(const Vec2<Scalar>& p, std::span<const Vec2<Scalar>> ring) {
  bool inside = false;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const Vec2<Scalar>& a = ring[i];
    const Vec2<Scalar>& b = ring[i + 1];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const Scalar x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

// Zero inside the polygon, boundary distance outside.
template <typename Scalar>
Scalar polygon_distance(const Vec2<Scalar>& p, std::span<const Vec2<Scalar>> ring) {
  if (point_in_ring<Scalar>(p, ring)) return Scalar(0);
  return polyline_distance<Scalar>(p, ring);
}

inline Box2 bounding_box(std::span<const Point2> points) {
  Box2 box;
  for (const auto& p : points) box.extend(p);
  return box;
}

// Distance from p to the box (0 inside). Used as a cheap lower bound before exact distances.
inline double box_distance(const Point2& p, const Box2& box) {
  if (box.isEmpty()) return std::numeric_limits<double>::infinity();
  return std::sqrt(box.squaredExteriorDistance(p));
}

// Uniform hash grid over a fixed point set for fixed-radius neighbour queries.
class PointGrid {
 public:
  PointGrid(std::span<const Point2> points, double cell_size)
      : points_(points), cell_(cell_size > 0.0 ? cell_size : 1.0) {
    cells_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) cells_[key_of(points[i])].push_back(i);
  }

  // Calls f(index) for every point within `radius` of p (inclusive), in ascending index order per cell.
  template <typename F>
  void for_each_within(const Point2& p, double radius, F&& f) const {
    const auto reach = static_cast<std::int64_t>(std::max(1.0, std::ceil(radius / cell_)));
    const Key centre = key_of(p);
    for (std::int64_t dx = -reach; dx <= reach; ++dx) {
      for (std::int64_t dy = -reach; dy <= reach; ++dy) {
        const auto it = cells_.find(Key{centre.x + dx, centre.y + dy});
        if (it == cells_.end()) continue;
        for (std::size_t idx : it->second) {
          if ((points_[idx] - p).norm() <= radius) f(idx);
        }
      }
    }
  }

 private:
  struct Key {
    std::int64_t x;
    std::int64_t y;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<std::int64_t>()(k.x * 73856093LL ^ k.y * 19349663LL);
    }
  };

  Key key_of(const Point2& p) const {
    return Key{static_cast<std::int64_t>(std::floor(p.x() / cell_)),
               static_cast<std::int64_t>(std::floor(p.y() / cell_))};
  }

  std::span<const Point2> points_;
  double cell_;
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> cells_;
};

// Disjoint-set forest with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
  }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

  // Component label per element: the smallest member index of its component.
  std::vector<std::size_t> labels() {
    std::vector<std::size_t> smallest(parent_.size(), parent_.size());
    for (std::size_t i = 0; i < parent_.size(); ++i) {
      auto& s = smallest[find(i)];
      if (s == parent_.size()) s = i;
    }
    std::vector<std::size_t> out(parent_.size());
    for (std::size_t i = 0; i < parent_.size(); ++i) out[i] = smallest[find(i)];
    return out;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace cad2gis

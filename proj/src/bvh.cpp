#include "gbt/bvh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace gbt {

Bvh::Bvh(std::span<const Triangle> triangles) {
  if (triangles.empty()) return;
  indices_.resize(triangles.size());
  for (std::uint32_t i = 0; i < indices_.size(); ++i) indices_[i] = i;
  std::vector<Vec3> centroids;
  centroids.reserve(triangles.size());
  for (const auto& t : triangles) centroids.push_back(t.centroid());
  nodes_.reserve(2 * triangles.size());
  nodes_.emplace_back();
  build(triangles, 0, 0, static_cast<std::uint32_t>(triangles.size()), centroids);
}

void Bvh::build(std::span<const Triangle> triangles, std::uint32_t node, std::uint32_t begin,
                std::uint32_t end, std::span<const Vec3> centroids) {
  Aabb box;
  Aabb centre_box;
  for (std::uint32_t i = begin; i < end; ++i) {
    box.extend(triangles[indices_[i]].bounds());
    centre_box.extend(centroids[indices_[i]]);
  }
  nodes_[node].box = box;

  const std::uint32_t n = end - begin;
  if (n <= kMaxLeafSize) {
    nodes_[node].first = begin;
    nodes_[node].count = n;
    return;
  }

  const int axis = centre_box.longest_axis();
  const std::uint32_t mid = begin + n / 2;
  // Ties on the split coordinate are ordered by index so the build is
  // reproducible across standard library implementations.
  std::nth_element(indices_.begin() + begin, indices_.begin() + mid, indices_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double ca = centroids[a][axis];
                     const double cb = centroids[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });

  const auto left = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  nodes_.emplace_back();
  nodes_[node].first = left;
  nodes_[node].count = 0;
  build(triangles, left, begin, mid, centroids);
  build(triangles, left + 1, mid, end, centroids);
}

namespace {

// Slab test. Returns the entry distance when the box overlaps [t_min, t_max].
// The exit bound is widened by a few ulps so a facet lying on a box face is
// never culled by rounding.
std::optional<double> enter_box(const Aabb& box, const Vec3& origin, const Vec3& inv_dir,
                                double t_min, double t_max) {
  double t0 = t_min;
  double t1 = t_max;
  for (int a = 0; a < 3; ++a) {
    if (std::isinf(inv_dir[a])) {
      if (origin[a] < box.lo[a] || origin[a] > box.hi[a]) return std::nullopt;
      continue;
    }
    double tn = (box.lo[a] - origin[a]) * inv_dir[a];
    double tf = (box.hi[a] - origin[a]) * inv_dir[a];
    if (tn > tf) std::swap(tn, tf);
    tf *= 1.0 + 4.0 * std::numeric_limits<double>::epsilon();
    t0 = std::max(t0, tn);
    t1 = std::min(t1, tf);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

}  // namespace

std::optional<Bvh::Hit> Bvh::nearest(std::span<const Triangle> triangles, const Vec3& origin,
                                     const Vec3& direction, double t_min, double t_max) const {
  if (nodes_.empty()) return std::nullopt;
  const Vec3 inv_dir = direction.cwiseInverse();

  std::optional<Hit> best;
  double best_t = t_max;

  std::array<std::uint32_t, 128> stack{};
  std::size_t top = 0;
  if (!enter_box(nodes_[0].box, origin, inv_dir, t_min, best_t)) return std::nullopt;
  stack[top++] = 0;

  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.leaf()) {
      for (std::uint32_t k = node.first; k < node.first + node.count; ++k) {
        const std::uint32_t tri = indices_[k];
        const auto t = intersect_triangle(triangles[tri], origin, direction);
        if (!t || *t <= t_min || *t > best_t) continue;
        if (!best || *t < best->t || (*t == best->t && tri < best->triangle)) {
          best = Hit{*t, tri};
          best_t = *t;
        }
      }
      continue;
    }
    const std::uint32_t a = node.first;
    const std::uint32_t b = node.first + 1;
    const auto ta = enter_box(nodes_[a].box, origin, inv_dir, t_min, best_t);
    const auto tb = enter_box(nodes_[b].box, origin, inv_dir, t_min, best_t);
    // Push the farther child first so the nearer one is popped next.
    if (ta && tb) {
      if (*ta <= *tb) {
        stack[top++] = b;
        stack[top++] = a;
      } else {
        stack[top++] = a;
        stack[top++] = b;
      }
    } else if (ta) {
      stack[top++] = a;
    } else if (tb) {
      stack[top++] = b;
    }
  }
  return best;
}

}  // namespace gbt

#pragma once

#include "gbt/triangle.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gbt {

// Median-split bounding volume hierarchy over triangle indices.
class Bvh {
 public:
  static constexpr std::uint32_t kMaxLeafSize = 4;

  struct Node {
    Aabb box;
    // Interior: children at `first` and `first + 1`. Leaf: `count` indices
    // starting at `first` in the index permutation.
    std::uint32_t first = 0;
    std::uint32_t count = 0;

    bool leaf() const { return count > 0; }
  };

  struct Hit {
    double t;
    std::uint32_t triangle;
  };

  Bvh() = default;
  explicit Bvh(std::span<const Triangle> triangles);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& indices() const { return indices_; }
  bool empty() const { return nodes_.empty(); }

  // Nearest hit with t in (t_min, t_max]; equal t resolves to the lower index.
  std::optional<Hit> nearest(std::span<const Triangle> triangles, const Vec3& origin,
                             const Vec3& direction, double t_min, double t_max) const;

 private:
  void build(std::span<const Triangle> triangles, std::uint32_t node, std::uint32_t begin,
             std::uint32_t end, std::span<const Vec3> centroids);

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> indices_;
};

}  // namespace gbt

#pragma once

#include "gbt/geometry.hpp"

#include <optional>

namespace gbt {

struct Triangle {
  Vec3 v0, v1, v2;
  int material_id = 0;

  Vec3 centroid() const { return (v0 + v1 + v2) / 3.0; }
  Aabb bounds() const {
    Aabb b;
    b.extend(v0);
    b.extend(v1);
    b.extend(v2);
    return b;
  }
  Vec3 unit_normal() const { return (v1 - v0).cross(v2 - v0).normalized(); }
  double area() const { return 0.5 * (v1 - v0).cross(v2 - v0).norm(); }
};

// Moller-Trumbore with inclusive edges. Returns the hit distance, or nothing
// for a miss or a ray parallel to the facet plane.
std::optional<double> intersect_triangle(const Triangle& tri, const Vec3& origin,
                                         const Vec3& direction);

}  // namespace gbt

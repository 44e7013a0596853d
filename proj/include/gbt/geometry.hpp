#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <limits>

namespace gbt {

using Vec3 = Eigen::Vector3d;

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  bool empty() const { return (lo.array() > hi.array()).any(); }

  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  bool contains(const Aabb& b) const {
    return (lo.array() <= b.lo.array()).all() && (hi.array() >= b.hi.array()).all();
  }
  Vec3 extent() const { return hi - lo; }
  double diameter() const { return empty() ? 0.0 : extent().norm(); }

  int longest_axis() const {
    const Vec3 e = extent();
    if (e.x() >= e.y() && e.x() >= e.z()) return 0;
    return e.y() >= e.z() ? 1 : 2;
  }
};

}  // namespace gbt

#include "gbt/scene.hpp"

#include "gbt/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace gbt {

namespace {

constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "building", "terrain", "road", "water", "tree"};

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
  throw InputError("scene line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::optional<Category> category_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == name) return static_cast<Category>(i);
  }
  return std::nullopt;
}

std::string_view category_name(Category c) { return kCategoryNames[static_cast<int>(c)]; }

const std::map<int, Material>& builtin_materials() {
  static const std::map<int, Material> table = {
      {0, Material{MaterialKind::hard, 1.0}},
      {1, Material{MaterialKind::excluded, 0.0}},
  };
  return table;
}

std::optional<double> intersect_triangle(const Triangle& tri, const Vec3& origin,
                                         const Vec3& direction) {
  const Vec3 e1 = tri.v1 - tri.v0;
  const Vec3 e2 = tri.v2 - tri.v0;
  const Vec3 pvec = direction.cross(e2);
  const double det = e1.dot(pvec);
  // |det| = |e1 x e2| * |cos(angle between ray and normal)|
  if (std::abs(det) <= 1e-12 * e1.cross(e2).norm()) return std::nullopt;
  const double inv_det = 1.0 / det;
  const Vec3 tvec = origin - tri.v0;
  const double u = tvec.dot(pvec) * inv_det;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 qvec = tvec.cross(e1);
  const double v = direction.dot(qvec) * inv_det;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  return e2.dot(qvec) * inv_det;
}

Scene::Scene(std::vector<Triangle> triangles, std::map<int, Material> materials)
    : triangles_(std::move(triangles)), materials_(std::move(materials)), bvh_(triangles_) {
  for (const auto& t : triangles_) bounds_.extend(t.bounds());
}

double Scene::reflection_coefficient(std::uint32_t triangle_index) const {
  return materials_.at(triangles_[triangle_index].material_id).reflection_coefficient;
}

namespace {

RayHit make_hit(const Triangle& tri, std::uint32_t index, double t, const Vec3& origin,
                const Vec3& direction) {
  RayHit hit;
  hit.t = t;
  hit.triangle_index = index;
  hit.point = origin + t * direction;
  hit.normal = tri.unit_normal();
  if (hit.normal.dot(direction) > 0.0) hit.normal = -hit.normal;
  return hit;
}

}  // namespace

std::optional<RayHit> Scene::intersect(const Vec3& origin, const Vec3& direction,
                                       double t_max) const {
  const auto hit = bvh_.nearest(triangles_, origin, direction, kHitEpsilon, t_max);
  if (!hit) return std::nullopt;
  return make_hit(triangles_[hit->triangle], hit->triangle, hit->t, origin, direction);
}

std::optional<RayHit> intersect_brute_force(const std::vector<Triangle>& triangles,
                                            const Vec3& origin, const Vec3& direction,
                                            double t_max) {
  std::optional<double> best_t;
  std::uint32_t best_index = 0;
  for (std::uint32_t i = 0; i < triangles.size(); ++i) {
    const auto t = intersect_triangle(triangles[i], origin, direction);
    if (!t || *t <= kHitEpsilon || *t > t_max) continue;
    if (!best_t || *t < *best_t) {
      best_t = t;
      best_index = i;
    }
  }
  if (!best_t) return std::nullopt;
  return make_hit(triangles[best_index], best_index, *best_t, origin, direction);
}

Scene parse_scene(std::istream& in, const CategoryFilter& filter) {
  const auto& materials = builtin_materials();
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::optional<Category> current;

  std::string line;
  std::size_t line_no = 0;
  std::size_t face_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag.front() == '#') continue;

    if (tag == "category") {
      std::string name;
      if (!(ls >> name)) fail_at(line_no, "category without a name");
      current = category_from_name(name);
      if (!current) fail_at(line_no, "unknown category '" + name + "'");
    } else if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) fail_at(line_no, "expected 'v <x> <y> <z>'");
      if (!p.allFinite()) fail_at(line_no, "non-finite vertex");
      vertices.push_back(p);
    } else if (tag == "f") {
      long long i = 0, j = 0, k = 0;
      int material = 0;
      if (!(ls >> i >> j >> k >> material)) {
        fail_at(line_no, "expected 'f <i> <j> <k> <material_id>'");
      }
      const auto n = static_cast<long long>(vertices.size());
      for (long long idx : {i, j, k}) {
        if (idx < 0 || idx >= n) {
          fail_at(line_no, "vertex index " + std::to_string(idx) + " out of range");
        }
      }
      if (!current) fail_at(line_no, "face outside a category block");
      const auto mat = materials.find(material);
      if (mat == materials.end()) {
        fail_at(line_no, "unknown material id " + std::to_string(material));
      }
      Triangle tri{vertices[i], vertices[j], vertices[k], material};
      const double scale = std::max({(tri.v1 - tri.v0).squaredNorm(),
                                     (tri.v2 - tri.v0).squaredNorm(),
                                     (tri.v2 - tri.v1).squaredNorm()});
      if (!(tri.area() > 1e-12 * scale)) {
        fail_at(line_no, "degenerate triangle (face " + std::to_string(face_no) + ")");
      }
      ++face_no;
      if (filter.includes(*current) && mat->second.kind != MaterialKind::excluded) {
        triangles.push_back(tri);
      }
    } else {
      fail_at(line_no, "unknown record '" + tag + "'");
    }
    std::string extra;
    if (ls >> extra && extra.front() != '#') fail_at(line_no, "trailing token '" + extra + "'");
  }
  return Scene(std::move(triangles), materials);
}

Scene load_scene(const std::filesystem::path& path, const CategoryFilter& filter) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scene file " + path.string());
  return parse_scene(in, filter);
}

}  // namespace gbt

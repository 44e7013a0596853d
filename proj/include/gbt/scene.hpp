#pragma once

#include "gbt/bvh.hpp"
#include "gbt/geometry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

namespace gbt {

// Self-intersection guard applied to every ray query (metres).
inline constexpr double kHitEpsilon = 1e-6;

enum class Category : int { building = 0, terrain, road, water, tree };
inline constexpr std::size_t kCategoryCount = 5;

std::optional<Category> category_from_name(std::string_view name);
std::string_view category_name(Category c);

// Ingestion counts per category (N_b, N_t, N_r, N_w, N_tree). A negative
// count excludes the whole category from the scene.
struct CategoryFilter {
  std::array<int, kCategoryCount> counts{0, 0, 0, 0, 0};

  bool includes(Category c) const { return counts[static_cast<int>(c)] >= 0; }
};

enum class MaterialKind { hard, excluded };

struct Material {
  MaterialKind kind = MaterialKind::hard;
  double reflection_coefficient = 1.0;
};

// Built-in material table: 0 = hard (rigid, +1), 1 = excluded.
const std::map<int, Material>& builtin_materials();

struct RayHit {
  double t = 0.0;
  std::uint32_t triangle_index = 0;
  Vec3 normal;  // unit, dot(normal, direction) < 0
  Vec3 point;
};

class Scene {
 public:
  Scene() = default;
  Scene(std::vector<Triangle> triangles, std::map<int, Material> materials);

  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::map<int, Material>& materials() const { return materials_; }
  const Bvh& bvh() const { return bvh_; }
  const Aabb& bounds() const { return bounds_; }
  bool empty() const { return triangles_.empty(); }

  double reflection_coefficient(std::uint32_t triangle_index) const;

  // Nearest hit with t in (kHitEpsilon, t_max]; ties go to the lower index.
  std::optional<RayHit> intersect(const Vec3& origin, const Vec3& direction,
                                  double t_max) const;

 private:
  std::vector<Triangle> triangles_;
  std::map<int, Material> materials_;
  Bvh bvh_;
  Aabb bounds_;
};

// Linear scan over every triangle; the reference for Scene::intersect.
std::optional<RayHit> intersect_brute_force(const std::vector<Triangle>& triangles,
                                            const Vec3& origin, const Vec3& direction,
                                            double t_max);

// Parses the plain-text triangle-soup format. Throws InputError with the
// offending line number on malformed input.
Scene parse_scene(std::istream& in, const CategoryFilter& filter);
Scene load_scene(const std::filesystem::path& path, const CategoryFilter& filter);

}  // namespace gbt

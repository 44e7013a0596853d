#include "gbt/citygen.hpp"

#include <fmt/ostream.h>

#include <random>

namespace gbt {

void add_box(std::vector<Triangle>& out, const Vec3& lo, const Vec3& hi, bool with_floor) {
  const auto corner = [&](int i) {
    return Vec3(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(), i & 4 ? hi.z() : lo.z());
  };
  const auto quad = [&](int a, int b, int c, int d) {
    out.push_back({corner(a), corner(b), corner(c), 0});
    out.push_back({corner(a), corner(c), corner(d), 0});
  };
  quad(0, 1, 5, 4);  // y = lo
  quad(2, 6, 7, 3);  // y = hi
  quad(0, 4, 6, 2);  // x = lo
  quad(1, 3, 7, 5);  // x = hi
  quad(4, 5, 7, 6);  // roof
  if (with_floor) quad(0, 2, 3, 1);
}

namespace {

void add_rect(std::vector<Triangle>& out, double x0, double y0, double x1, double y1, double z) {
  const Vec3 a(x0, y0, z), b(x1, y0, z), c(x1, y1, z), d(x0, y1, z);
  out.push_back({a, b, c, 0});
  out.push_back({a, c, d, 0});
}

// Uniform [0, 1) from the raw engine output, identical on every platform.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<SceneBlock> ground_plane(double half_size) {
  SceneBlock ground{Category::terrain, {}};
  add_rect(ground.triangles, -half_size, -half_size, half_size, half_size, 0.0);
  return {ground};
}

std::vector<SceneBlock> city_blocks(const CityParams& p) {
  std::mt19937_64 rng(p.seed);
  std::vector<SceneBlock> blocks = ground_plane(p.half_size);

  SceneBlock roads{Category::road, {}};
  add_rect(roads.triangles, -p.half_size, -4.0, p.half_size, 4.0, 0.02);
  add_rect(roads.triangles, -4.0, -p.half_size, 4.0, p.half_size, 0.02);
  blocks.push_back(std::move(roads));

  SceneBlock buildings{Category::building, {}};
  const double lot = 2.0 * p.half_size / static_cast<double>(p.blocks);
  for (std::size_t i = 0; i < p.blocks; ++i) {
    for (std::size_t j = 0; j < p.blocks; ++j) {
      const double x0 = -p.half_size + i * lot + 0.5 * p.street;
      const double y0 = -p.half_size + j * lot + 0.5 * p.street;
      const double w = lot - p.street;
      const double fx = 0.5 + 0.5 * unit(rng);
      const double fy = 0.5 + 0.5 * unit(rng);
      const double h = p.min_height + (p.max_height - p.min_height) * unit(rng);
      const Vec3 lo(x0, y0, 0.0);
      const Vec3 hi(x0 + fx * w, y0 + fy * w, h);
      const Vec3 centre = 0.5 * (lo + hi);
      if (std::hypot(centre.x(), centre.y()) < p.clear_radius + 0.5 * w) continue;
      add_box(buildings.triangles, lo, hi);
    }
  }
  blocks.push_back(std::move(buildings));

  if (p.water) {
    SceneBlock water{Category::water, {}};
    const double a = 0.55 * p.half_size;
    add_rect(water.triangles, a, -a - 20.0, a + 20.0, -a, 0.01);
    blocks.push_back(std::move(water));
  }

  SceneBlock trees{Category::tree, {}};
  for (std::size_t t = 0; t < p.trees; ++t) {
    const double x = (2.0 * unit(rng) - 1.0) * 0.9 * p.half_size;
    const double y = (unit(rng) < 0.5 ? -1.0 : 1.0) * (5.0 + 1.5 * unit(rng));
    add_box(trees.triangles, Vec3(x - 1.0, y - 1.0, 0.0), Vec3(x + 1.0, y + 1.0, 6.0));
  }
  if (!trees.triangles.empty()) blocks.push_back(std::move(trees));
  return blocks;
}

void write_scene(std::ostream& out, std::span<const SceneBlock> blocks) {
  std::size_t next = 0;
  for (const SceneBlock& b : blocks) {
    fmt::print(out, "category {}\n", category_name(b.category));
    for (const Triangle& t : b.triangles) {
      for (const Vec3* v : {&t.v0, &t.v1, &t.v2}) fmt::print(out, "v {} {} {}\n", v->x(), v->y(), v->z());
      fmt::print(out, "f {} {} {} {}\n", next, next + 1, next + 2, t.material_id);
      next += 3;
    }
  }
}

Scene build_scene(std::span<const SceneBlock> blocks, const CategoryFilter& filter) {
  std::vector<Triangle> triangles;
  for (const SceneBlock& b : blocks) {
    if (!filter.includes(b.category)) continue;
    triangles.insert(triangles.end(), b.triangles.begin(), b.triangles.end());
  }
  return Scene(std::move(triangles), builtin_materials());
}

}  // namespace gbt

#pragma once

// Deterministic synthetic scenes: a rigid ground plane and a city-like block
// layout of box buildings, roads, a pond and trees.

#include "gbt/scene.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace gbt {

struct SceneBlock {
  Category category = Category::building;
  std::vector<Triangle> triangles;
};

// Closed box [lo, hi] as 12 triangles (10 without the floor), material 0.
void add_box(std::vector<Triangle>& out, const Vec3& lo, const Vec3& hi, bool with_floor = false);

// Square z = 0 plane of the given half size, category terrain.
std::vector<SceneBlock> ground_plane(double half_size);

struct CityParams {
  double half_size = 120.0;       // ground extends over [-h, h]^2
  std::size_t blocks = 6;         // blocks x blocks building lots
  double street = 14.0;           // clear width between lots
  double min_height = 6.0;
  double max_height = 30.0;
  double clear_radius = 20.0;     // no buildings within this distance of the origin
  std::size_t trees = 12;
  bool water = true;
  std::uint64_t seed = 2024;
};

std::vector<SceneBlock> city_blocks(const CityParams& params);

// Scene file text for the blocks, one category block each.
void write_scene(std::ostream& out, std::span<const SceneBlock> blocks);

// Scene built directly from the blocks, applying the category filter.
Scene build_scene(std::span<const SceneBlock> blocks, const CategoryFilter& filter = {});

}  // namespace gbt

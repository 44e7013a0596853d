#include "gbt/citygen.hpp"
#include "gbt/error.hpp"
#include "gbt/scene.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

using namespace gbt;

namespace {

Scene parse(const std::string& text, CategoryFilter filter = {}) {
  std::istringstream in(text);
  return parse_scene(in, filter);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

const char* kTwoTriangles =
    "# unit square\n"
    "category building\n"
    "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
    "f 0 1 2 0\nf 0 2 3 0\n";

}  // namespace

TEST_SUITE("scene") {

TEST_CASE("two hard triangles are ingested") {
  const Scene s = parse(kTwoTriangles);
  CHECK(s.triangles().size() == 2);
  CHECK(s.reflection_coefficient(0) == 1.0);
  CHECK(s.bvh().nodes().size() == 1);
}

TEST_CASE("negative category count excludes the block") {
  const std::string text = std::string(kTwoTriangles) +
                           "category water\nv 0 0 1\nv 1 0 1\nv 1 1 1\nf 4 5 6 0\n";
  CHECK(parse(text).triangles().size() == 3);
  CategoryFilter no_water;
  no_water.counts = {1000, 4000, 5000, -10, -10};
  const Scene s = parse(text, no_water);
  REQUIRE(s.triangles().size() == 2);
  for (const auto& t : s.triangles()) CHECK(t.v0.z() == 0.0);
}

TEST_CASE("empty facet list gives an empty scene") {
  const Scene s = parse("# nothing\ncategory terrain\n");
  CHECK(s.empty());
  CHECK(s.bvh().empty());
  CHECK_FALSE(s.intersect(Vec3::Zero(), Vec3::UnitX(), 100.0));
}

TEST_CASE("excluded material is dropped") {
  const Scene s = parse("category road\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2 1\n");
  CHECK(s.empty());
}

TEST_CASE("malformed input reports the line") {
  CHECK(error_of("category building\nv 0 0\n").find("line 2") != std::string::npos);
  CHECK(error_of("category park\n").find("unknown category") != std::string::npos);
  CHECK(error_of("x 1 2 3\n").find("unknown record") != std::string::npos);
  CHECK(error_of("category building\nv 0 0 0\nf 0 1 2 0\n").find("out of range") != std::string::npos);
  CHECK(error_of("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2 0\n").find("outside a category") !=
        std::string::npos);
  CHECK(error_of("category building\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2 7\n").find("material id 7") !=
        std::string::npos);
  CHECK(error_of("category building\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2 0 9\n").find("trailing") !=
        std::string::npos);
}

TEST_CASE("degenerate triangle is rejected with its face index") {
  const std::string msg = error_of(std::string(kTwoTriangles) + "v 2 0 0\nv 3 0 0\nf 4 5 0 0\n");
  CHECK(msg.find("degenerate") != std::string::npos);
  CHECK(msg.find("face 2") != std::string::npos);
  CHECK(msg.find("line 11") != std::string::npos);
}

TEST_CASE("single triangle BVH is one leaf") {
  const std::vector<Triangle> t{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), 0}};
  const Bvh bvh(t);
  REQUIRE(bvh.nodes().size() == 1);
  CHECK(bvh.nodes()[0].leaf());
  CHECK(bvh.nodes()[0].count == 1);
}

TEST_CASE("two clusters are separated at the root") {
  std::vector<Triangle> tris;
  for (int i = 0; i < 4; ++i) {
    const Vec3 a(-100.0 + i, 0, 0);
    tris.push_back({a, a + Vec3(0.5, 0, 0), a + Vec3(0, 0.5, 0), 0});
    const Vec3 b(100.0 + i, 0, 0);
    tris.push_back({b, b + Vec3(0.5, 0, 0), b + Vec3(0, 0.5, 0), 0});
  }
  const Bvh bvh(tris);
  const auto& n = bvh.nodes();
  REQUIRE_FALSE(n[0].leaf());
  const auto& left = n[n[0].first];
  const auto& right = n[n[0].first + 1];
  CHECK(left.box.hi.x() < 0.0);
  CHECK(right.box.lo.x() > 0.0);
}

TEST_CASE("BVH invariants: every index in one leaf, boxes contain their triangles") {
  const auto tris = test::random_triangles(500, 3);
  const Bvh bvh(tris);
  std::multiset<std::uint32_t> seen;
  for (const auto& node : bvh.nodes()) {
    if (!node.leaf()) continue;
    CHECK(node.count <= Bvh::kMaxLeafSize);
    for (std::uint32_t k = node.first; k < node.first + node.count; ++k) {
      const auto idx = bvh.indices()[k];
      seen.insert(idx);
      CHECK(node.box.contains(tris[idx].bounds()));
    }
  }
  CHECK(seen.size() == tris.size());
  CHECK(std::set<std::uint32_t>(seen.begin(), seen.end()).size() == tris.size());
  // Interior boxes contain their children.
  for (const auto& node : bvh.nodes()) {
    if (node.leaf()) continue;
    CHECK(node.box.contains(bvh.nodes()[node.first].box));
    CHECK(node.box.contains(bvh.nodes()[node.first + 1].box));
  }
}

TEST_CASE("BVH nearest hit equals brute force") {
  const auto tris = test::random_triangles(1000, 11);
  const Scene s(tris, builtin_materials());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(-60.0, 60.0);
  int hits = 0;
  for (int i = 0; i < 3000; ++i) {
    const Vec3 o(pos(rng), pos(rng), pos(rng));
    const Vec3 d = test::random_unit(rng);
    const auto a = s.intersect(o, d, 1e9);
    const auto b = intersect_brute_force(tris, o, d, 1e9);
    REQUIRE(a.has_value() == b.has_value());
    if (!a) continue;
    ++hits;
    CHECK(a->triangle_index == b->triangle_index);
    CHECK(a->t == doctest::Approx(b->t).epsilon(1e-12));
    CHECK(a->normal.dot(d) < 0.0);
  }
  CHECK(hits > 300);
}

TEST_CASE("ray at a unit square 10 m away hits at t = 10") {
  const Scene s = parse(kTwoTriangles);
  const auto hit = s.intersect(Vec3(0.25, 0.5, 10.0), Vec3(0, 0, -1), 100.0);
  REQUIRE(hit);
  CHECK(hit->t == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(hit->normal.z() == doctest::Approx(1.0));
  CHECK_FALSE(s.intersect(Vec3(0.25, 0.5, 10.0), Vec3(0, 0, -1), 9.5));
}

TEST_CASE("ray parallel to every facet misses") {
  const Scene s = parse(kTwoTriangles);
  CHECK_FALSE(s.intersect(Vec3(-1.0, 0.5, 0.0), Vec3(1, 0, 0), 100.0));
  CHECK_FALSE(s.intersect(Vec3(-1.0, 0.5, 1.0), Vec3(1, 0, 0), 100.0));
}

TEST_CASE("stacked facets: nearer one wins") {
  std::vector<Triangle> tris;
  for (double z : {5.0, 2.0, 8.0}) {
    tris.push_back({Vec3(-1, -1, z), Vec3(1, -1, z), Vec3(0, 1, z), 0});
  }
  const Scene s(tris, builtin_materials());
  const auto hit = s.intersect(Vec3(0, 0, 0), Vec3(0, 0, 1), 100.0);
  REQUIRE(hit);
  CHECK(hit->triangle_index == 1);
  CHECK(hit->t == doctest::Approx(2.0));
  CHECK(hit->normal.z() == doctest::Approx(-1.0));
  const auto b = intersect_brute_force(tris, Vec3(0, 0, 0), Vec3(0, 0, 1), 100.0);
  CHECK(b->triangle_index == hit->triangle_index);
}

TEST_CASE("coincident facets resolve to the lower index") {
  const Triangle t{Vec3(-1, -1, 3), Vec3(1, -1, 3), Vec3(0, 1, 3), 0};
  const std::vector<Triangle> tris{t, t, t};
  const Scene s(tris, builtin_materials());
  CHECK(s.intersect(Vec3::Zero(), Vec3::UnitZ(), 10.0)->triangle_index == 0);
}

TEST_CASE("self-intersection guard skips hits closer than 1e-6 m") {
  const Scene s = parse(kTwoTriangles);
  CHECK_FALSE(s.intersect(Vec3(0.5, 0.5, 5e-7), Vec3(0, 0, -1), 10.0));
  CHECK(s.intersect(Vec3(0.5, 0.5, 2e-6), Vec3(0, 0, -1), 10.0));
}

TEST_CASE("excluding a category leaves other hits unchanged") {
  const auto blocks = city_blocks(CityParams{});
  CategoryFilter no_trees;
  no_trees.counts = {1, 1, 1, 1, -10};
  const Scene all = build_scene(blocks);
  const Scene some = build_scene(blocks, no_trees);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pos(-100.0, 100.0);
  std::uniform_real_distribution<double> h(0.5, 40.0);
  int compared = 0;
  for (int i = 0; i < 2000; ++i) {
    const Vec3 o(pos(rng), pos(rng), h(rng));
    const Vec3 d = test::random_unit(rng);
    const auto a = all.intersect(o, d, 1e9);
    if (!a || all.triangles()[a->triangle_index].v0.z() == 0.0) continue;
    // Trees are the last block, so other triangles keep their indices.
    const bool tree = a->triangle_index >= some.triangles().size();
    if (tree) continue;
    const auto b = some.intersect(o, d, 1e9);
    REQUIRE(b);
    CHECK(b->triangle_index == a->triangle_index);
    CHECK(b->t == a->t);
    ++compared;
  }
  CHECK(compared > 100);
}

TEST_CASE("scene writer round-trips through the parser") {
  const auto blocks = city_blocks(CityParams{});
  std::stringstream text;
  write_scene(text, blocks);
  const Scene parsed = parse_scene(text, CategoryFilter{});
  const Scene built = build_scene(blocks);
  REQUIRE(parsed.triangles().size() == built.triangles().size());
  for (std::size_t i = 0; i < built.triangles().size(); ++i) {
    CHECK(parsed.triangles()[i].v0 == built.triangles()[i].v0);
    CHECK(parsed.triangles()[i].v2 == built.triangles()[i].v2);
  }
}

}  // TEST_SUITE

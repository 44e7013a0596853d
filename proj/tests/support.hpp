#pragma once

#include "gbt/citygen.hpp"
#include "gbt/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <random>

namespace gbt::test {

inline std::filesystem::path data_dir() { return GBT_DATA_DIR; }

// City-like scene and input used by the schedule and timing checks.
struct CityCase {
  Scene scene;
  PipelineInput input;

  CityCase(std::size_t n_theta, std::size_t n_phi, std::size_t nu, std::size_t nv,
           std::vector<double> freqs = {500.0}) {
    CityParams p;
    p.half_size = 100.0;
    p.blocks = 5;
    scene = build_scene(city_blocks(p));
    input.scene = &scene;
    input.source.position = Vec3(0.0, 0.0, 2.0);
    input.source.frequencies_hz = std::move(freqs);
    input.source.beam_eps_m = 10.0;
    input.grid.n_theta = n_theta;
    input.grid.n_phi = n_phi;
    input.trace.n_steps = 4000;
    input.trace.r_max = 20;
    input.atmosphere = Atmosphere::from_conditions(20.0, 70.0, 1.0);
    const double du = 180.0 / static_cast<double>(std::max<std::size_t>(nu - 1, 1));
    const double dv = 180.0 / static_cast<double>(std::max<std::size_t>(nv - 1, 1));
    for (std::size_t j = 0; j < nv; ++j) {
      for (std::size_t i = 0; i < nu; ++i) {
        input.observers.emplace_back(-90.0 + du * i, -90.0 + dv * j, 1.5);
      }
    }
  }
};

inline std::vector<Triangle> random_triangles(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-50.0, 50.0);
  std::uniform_real_distribution<double> off(-4.0, 4.0);
  std::vector<Triangle> tris;
  while (tris.size() < n) {
    const Vec3 c(pos(rng), pos(rng), pos(rng));
    Triangle t{c + Vec3(off(rng), off(rng), off(rng)), c + Vec3(off(rng), off(rng), off(rng)),
               c + Vec3(off(rng), off(rng), off(rng)), 0};
    if (t.area() > 1e-3) tris.push_back(t);
  }
  return tris;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 v;
  do {
    v = Vec3(g(rng), g(rng), g(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

}  // namespace gbt::test

#include "gbt/gbs.hpp"
#include "gbt/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace gbt;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("free monopole") {
  const double k = 2.0;
  const Complex p = oracle::monopole_free(1.0, k);
  CHECK(std::abs(p) == doctest::Approx(1.0 / (4 * kPi)));
  CHECK(std::arg(p) == doctest::Approx(2.0));
  CHECK(std::abs(oracle::monopole_free(10.0, k)) == doctest::Approx(1.0 / (40 * kPi)));
  CHECK_THROWS_AS(oracle::monopole_free(0.0, k), std::domain_error);
  CHECK_THROWS_AS(oracle::monopole_free(-1.0, k), std::domain_error);
}

TEST_CASE("monopole case wavenumber") {
  oracle::MonopoleCase mc;
  CHECK(mc.wavenumber() == doctest::Approx(2 * kPi * 50.0 / 343.2));
}

TEST_CASE("image field doubles on the plane") {
  oracle::MonopoleCase mc;
  for (double x : {0.5, 7.0, 40.0}) {
    const Vec3 obs(x, 2.0, 0.0);
    const double r = (obs - Vec3(0, 0, mc.source_z)).norm();
    const Complex p = oracle::image_source_field(mc, obs);
    const Complex direct = oracle::monopole_free(r, mc.wavenumber());
    CHECK(std::abs(p - 2.0 * direct) <= 1e-14 * std::abs(p));
  }
  CHECK_THROWS_AS(oracle::image_source_field(mc, Vec3(0, 0, -0.1)), std::domain_error);
}

TEST_CASE("grazing far field tends to twice the direct field") {
  oracle::MonopoleCase mc;
  const double R = 1e7;
  const Vec3 obs(R, 0.0, 1.0);
  const Complex p = oracle::image_source_field(mc, obs);
  CHECK(std::abs(std::abs(p) * 4 * kPi * R / 2.0 - 1.0) <= 1e-6);
}

TEST_CASE("predicted nulls are symmetric local minima") {
  oracle::MonopoleCase mc;
  const auto nulls = oracle::interference_nulls(mc, 10.0, -30.0, 30.0);
  REQUIRE(nulls.size() == 2);
  CHECK(nulls[0] < 0.0);
  CHECK(nulls[0] == doctest::Approx(-nulls[1]).epsilon(1e-9));
  const double half_wave = kPi / mc.wavenumber();
  for (double x : nulls) {
    const Vec3 obs(x, 0.0, 10.0);
    const double r1 = (obs - Vec3(0, 0, 5)).norm();
    const double r2 = (obs - Vec3(0, 0, -5)).norm();
    CHECK(r2 - r1 == doctest::Approx(half_wave).epsilon(1e-9));
    // Opposite phases: only the spreading mismatch is left.
    const double at = std::abs(oracle::image_source_field(mc, obs));
    CHECK(at == doctest::Approx((1.0 / r1 - 1.0 / r2) / (4 * kPi)).epsilon(1e-9));
  }
}

TEST_CASE("nulls follow the source position and the frequency") {
  oracle::MonopoleCase mc;
  mc.source_x = 3.0;
  mc.freq_hz = 500.0;
  const auto nulls = oracle::interference_nulls(mc, 10.0, -30.0, 30.0);
  CHECK(nulls.size() > 10);
  for (std::size_t i = 1; i < nulls.size(); ++i) CHECK(nulls[i] > nulls[i - 1]);
  for (double x : nulls) {
    const Vec3 obs(x, 0.0, 10.0);
    const double d = (obs - Vec3(3, 0, -5)).norm() - (obs - Vec3(3, 0, 5)).norm();
    const double m = d / (kPi / mc.wavenumber());
    CHECK(std::abs(m - std::round(m)) < 1e-6);
    CHECK(static_cast<long>(std::round(m)) % 2 == 1);
  }
}

TEST_CASE("brute-force sum") {
  const std::vector<BeamPath> none;
  CHECK(oracle::brute_force_sum(Vec3(1, 1, 1), none, 10.0, 1.0) == Complex(0.0, 0.0));

  LaunchGrid g;
  g.n_theta = 1;
  g.n_phi = 1;
  SourceSpec s;
  s.beam_eps_m = 10.0;
  const Atmosphere atm = Atmosphere::from_conditions(20.0, 70.0, 1.0);
  const auto ray = launch_directions(g).front();
  const std::vector<BeamPath> one{trace(Scene{}, s, ray, TraceConfig{}, atm)};
  const Vec3 obs(-20.0, 1.0, 0.5);
  const double omega = 2 * kPi * 100.0;
  const Complex expected = 0.5 * (omega / atm.sound_speed) * ray.weight_dgamma *
                           beam_pressure(one[0], nearest_on_path(obs, one[0]), omega);
  const Complex got = oracle::brute_force_sum(obs, one, omega, 0.5);
  CHECK(std::abs(got - expected) <= 1e-12 * std::abs(expected));
}

}  // TEST_SUITE

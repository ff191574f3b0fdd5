#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tsasim/actuation.hpp"
#include "tsasim/tsa.hpp"

using namespace tsasim;

namespace {
const TsaParams kDefault{};
}

TEST_CASE("contraction at zero twist is exactly zero") {
  CHECK(contraction(kDefault, 0.0) == 0.0);
}

TEST_CASE("contraction at 26 rotations matches the helix value") {
  // Evaluated independently before the build: 80 - sqrt(80^2 - (2*pi*26*0.35)^2).
  const double expected = 24.04651719344755;
  const double got = contraction(kDefault, 26.0);
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));
  // Strain stays in the 20-40% band of the zone length.
  CHECK(got > 0.20 * kDefault.twist_zone_length_mm);
  CHECK(got < 0.40 * kDefault.twist_zone_length_mm);
}

TEST_CASE("contraction near max twist stays below the zone length") {
  const double x = contraction(kDefault, kDefault.max_twist_rot - 1e-9);
  CHECK(x < kDefault.twist_zone_length_mm);
  CHECK(x > 0.0);
}

TEST_CASE("contraction rejects out-of-domain twists") {
  CHECK_THROWS_AS(contraction(kDefault, -0.1), std::domain_error);
  CHECK_THROWS_AS(contraction(kDefault, kDefault.max_twist_rot + 0.1), std::domain_error);
  CHECK_THROWS_AS(linear_jacobian(kDefault, -1.0), std::domain_error);
}

TEST_CASE("contraction is strictly increasing and convex") {
  double prev_x = contraction(kDefault, 0.0);
  double prev_dx = -1.0;
  const double h = kDefault.max_twist_rot / 200.0;
  for (int i = 1; i <= 200; ++i) {
    const double x = contraction(kDefault, i * h);
    const double dx = x - prev_x;
    CHECK(dx > 0.0);
    CHECK(dx > prev_dx);  // convex: increments grow
    prev_x = x;
    prev_dx = dx;
  }
}

TEST_CASE("linear jacobian is the derivative of contraction") {
  CHECK(linear_jacobian(kDefault, 0.0) == 0.0);
  const double step = 1e-4;
  for (int i = 0; i < 100; ++i) {
    const double t = step + seeded_uniform(7, i) * (kDefault.max_twist_rot - 2 * step);
    const double fd = (contraction(kDefault, t + step) - contraction(kDefault, t - step)) /
                      (2 * step);
    CHECK(linear_jacobian(kDefault, t) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("linear jacobian strictly increases with twist") {
  double prev = linear_jacobian(kDefault, 1.0);
  for (double t : {5.0, 10.0, 20.0}) {
    const double j = linear_jacobian(kDefault, t);
    CHECK(j > prev);
    prev = j;
  }
}

TEST_CASE("tension from torque") {
  CHECK(tension_from_torque(kDefault, 10.0, 0.0) == 0.0);
  // Zero twist hits the jacobian floor.
  CHECK(tension_from_torque(kDefault, 0.0, 44.129925) ==
        doctest::Approx(44.129925 / kDefault.jacobian_floor_mm_per_rot));
  // Formula value at the blocked-force calibration point.
  CHECK(tension_from_torque(kDefault, 26.0, 44.129925) ==
        doctest::Approx(19.637756845072314).epsilon(1e-12));
  CHECK_THROWS_AS(tension_from_torque(kDefault, 1.0, -1.0), std::domain_error);
}

TEST_CASE("tension is non-increasing in twist at fixed torque") {
  double prev = tension_from_torque(kDefault, 0.0, 44.129925);
  for (int i = 1; i <= 60; ++i) {
    const double t = kDefault.max_twist_rot * i / 60.0;
    const double tension = tension_from_torque(kDefault, t, 44.129925);
    CHECK(tension <= prev + 1e-12);
    prev = tension;
  }
}

TEST_CASE("contraction is injective: bisection recovers the twist") {
  for (int i = 0; i < 20; ++i) {
    const double target_twist = 0.5 + seeded_uniform(11, i) * (kDefault.max_twist_rot - 0.5);
    const double target_x = contraction(kDefault, target_twist);
    double lo = 0.0, hi = kDefault.max_twist_rot;
    for (int k = 0; k < 200; ++k) {
      const double mid = 0.5 * (lo + hi);
      (contraction(kDefault, mid) < target_x ? lo : hi) = mid;
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(target_twist).epsilon(1e-9));
  }
}

TEST_CASE("state factory keeps contraction derived") {
  const TsaState s = make_tsa_state(kDefault, 13.0, 2.5);
  CHECK(s.contraction_mm == contraction(kDefault, 13.0));
  CHECK(s.tension_n == 2.5);
  CHECK_THROWS_AS(make_tsa_state(kDefault, 1.0, -0.5), std::domain_error);
}

TEST_CASE("parameter validation names bad fields") {
  TsaParams p = kDefault;
  p.string_radius_mm = -1.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("string_radius"), std::invalid_argument);
  p = kDefault;
  p.max_twist_rot = p.singularity_twist_rot() + 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tsasim/thumb.hpp"

using namespace tsasim;

namespace {
ThumbParams default_thumb() {
  ThumbParams t{};
  t.bend_drive.pre_stretch_mm = 0.8;
  t.roll_drive.pre_stretch_mm = 0.8;
  return t;
}
}  // namespace

TEST_CASE("zero twists give a near-zero pose up to gravity sag") {
  const ThumbParams t = default_thumb();
  const ThumbPose p = thumb_pose(t, 0.0, 0.0, Orientation::HorizontalUp);
  CHECK(std::abs(p.euler_x_deg) < 5.0);
  CHECK(std::abs(p.euler_y_deg) < 5.0);
  CHECK(std::abs(p.euler_z_deg) < 5.0);
}

TEST_CASE("bend motor only: x-axis change dominates") {
  const ThumbParams t = default_thumb();
  const ThumbPose rest = thumb_pose(t, 0.0, 0.0, Orientation::VerticalUp);
  const ThumbPose bent = thumb_pose(t, 18.0, 0.0, Orientation::VerticalUp);
  const double dx = std::abs(bent.euler_x_deg - rest.euler_x_deg);
  const double dy = std::abs(bent.euler_y_deg - rest.euler_y_deg);
  const double dz = std::abs(bent.euler_z_deg - rest.euler_z_deg);
  CHECK(dx > dy);
  CHECK(dx > dz);
  CHECK(dx > 10.0);
}

TEST_CASE("roll motor only: y-axis dominates with coupled x and z") {
  const ThumbParams t = default_thumb();
  const ThumbPose rest = thumb_pose(t, 0.0, 0.0, Orientation::VerticalUp);
  const ThumbPose rolled = thumb_pose(t, 0.0, 14.0, Orientation::VerticalUp);
  const double dx = std::abs(rolled.euler_x_deg - rest.euler_x_deg);
  const double dy = std::abs(rolled.euler_y_deg - rest.euler_y_deg);
  const double dz = std::abs(rolled.euler_z_deg - rest.euler_z_deg);
  CHECK(dy > dx);
  CHECK(dy > dz);
  CHECK(dx > 0.1);
  CHECK(dz > 0.1);
}

TEST_CASE("roll saturates at exactly 90 degrees and never exceeds it") {
  const ThumbParams t = default_thumb();
  double prev = 0.0;
  bool saturated = false;
  for (double twist = 0.0; twist <= 26.0; twist += 1.0) {
    const ThumbPose p = thumb_pose(t, 0.0, twist, Orientation::HorizontalUp);
    CHECK(p.roll_angle_deg <= 90.0);
    CHECK(p.roll_angle_deg >= prev - 1e-9);
    prev = p.roll_angle_deg;
    if (p.roll_angle_deg == 90.0) saturated = true;
  }
  CHECK(saturated);
}

TEST_CASE("diagonal coupling decouples bend and roll") {
  ThumbParams t = default_thumb();
  t.coupling = {{{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}}};
  t.finger.link_mass_g = {1e-9, 1e-9, 1e-9, 1e-9};  // suppress gravity sag
  t.roll_gravity_nmm = 0.0;
  const ThumbPose bent = thumb_pose(t, 15.0, 0.0, Orientation::HorizontalUp);
  CHECK(bent.euler_y_deg == doctest::Approx(0.0));
  CHECK(bent.euler_z_deg == doctest::Approx(0.0));
  const ThumbPose rolled = thumb_pose(t, 0.0, 10.0, Orientation::HorizontalUp);
  CHECK(rolled.euler_x_deg == doctest::Approx(0.0));
  CHECK(rolled.euler_z_deg == doctest::Approx(0.0));
}

TEST_CASE("roll is more orientation-sensitive than bend") {
  const ThumbParams t = default_thumb();
  const double bend_vu = thumb_pose(t, 10.0, 0.0, Orientation::VerticalUp).bend_angle_deg;
  const double bend_vd = thumb_pose(t, 10.0, 0.0, Orientation::VerticalDown).bend_angle_deg;
  const double roll_vu = thumb_pose(t, 0.0, 10.0, Orientation::VerticalUp).roll_angle_deg;
  const double roll_vd = thumb_pose(t, 0.0, 10.0, Orientation::VerticalDown).roll_angle_deg;
  CHECK(std::abs(roll_vu - roll_vd) > std::abs(bend_vu - bend_vd));
}

TEST_CASE("coupling validation enforces dominance structure") {
  ThumbParams t = default_thumb();
  t.coupling[0][0] = 0.05;  // bend column no longer x-dominant
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = default_thumb();
  t.coupling[0][1] = 0.0;  // roll column loses its x coupling
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  CHECK_NOTHROW(default_thumb().validate());
}

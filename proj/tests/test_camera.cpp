#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opd/camera.hpp"
#include "test_util.hpp"

using namespace opd;

TEST_CASE("back_project principal point gives the optical axis") {
  Intrinsics K{123.0, 456.0, 320.0, 240.0, 0.0};
  const Vec3 p = back_project(Pixel{320.0, 240.0}, 10.0, K);
  CHECK(p.x() == 0.0);
  CHECK(p.y() == 0.0);
  CHECK(p.z() == 10.0);
}

TEST_CASE("back_project with identity-like K scales the pixel by depth") {
  Intrinsics K{1.0, 1.0, 0.0, 0.0, 0.0};
  const Vec3 p = back_project(Pixel{2.0, 3.0}, 2.0, K);
  CHECK(p.x() == 4.0);
  CHECK(p.y() == 6.0);
  CHECK(p.z() == 2.0);
}

TEST_CASE("back_project hand-checked endoscope-scale example") {
  // K^-1 [420, 340, 1]^T * 100 with fx=fy=500, cx=320, cy=240.
  Intrinsics K{500.0, 500.0, 320.0, 240.0, 0.0};
  const Vec3 p = back_project(Pixel{420.0, 340.0}, 100.0, K);
  CHECK(p.x() == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(p.y() == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(p.z() == 100.0);
}

TEST_CASE("back_project rejects bad depths and bad intrinsics") {
  Intrinsics K{100.0, 100.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(back_project(Pixel{0, 0}, 0.0, K), std::invalid_argument);
  CHECK_THROWS_AS(back_project(Pixel{0, 0}, -1.0, K), std::invalid_argument);
  CHECK_THROWS_AS(
      back_project(Pixel{0, 0}, std::numeric_limits<double>::infinity(), K),
      std::invalid_argument);
  CHECK_THROWS_AS(back_project(Pixel{0, 0}, 1.0, Intrinsics{0, 1, 0, 0, 0}),
                  std::invalid_argument);
}

TEST_CASE("project maps the optical axis to the principal point") {
  Intrinsics K{77.0, 88.0, 11.0, 22.0, 0.0};
  const Pixel u = project(Vec3(0, 0, 10), K);
  CHECK(u.x == 11.0);
  CHECK(u.y == 22.0);
}

TEST_CASE("project forward of the hand-checked example") {
  Intrinsics K{500.0, 500.0, 320.0, 240.0, 0.0};
  const Pixel u = project(Vec3(20, 20, 100), K);
  CHECK(u.x == doctest::Approx(420.0).epsilon(1e-12));
  CHECK(u.y == doctest::Approx(340.0).epsilon(1e-12));
}

TEST_CASE("project rejects points behind the camera") {
  Intrinsics K{100.0, 100.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(project(Vec3(0, 0, 0), K), std::invalid_argument);
  CHECK_THROWS_AS(project(Vec3(1, 1, -5), K), std::invalid_argument);
}

TEST_CASE("round trip project(back_project) is the identity") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Intrinsics K = test::random_intrinsics(rng, 640.0);
    const Pixel u{test::uniform(rng, -100.0, 740.0),
                  test::uniform(rng, -100.0, 580.0)};
    const double d = test::uniform(rng, 0.1, 500.0);
    const Vec3 p = back_project(u, d, K);
    CHECK(p.z() == d);  // depth is the z coordinate, exactly
    const Pixel v = project(p, K);
    CHECK(std::abs(v.x - u.x) < 1e-9);
    CHECK(std::abs(v.y - u.y) < 1e-9);
  }
}

TEST_CASE("back_project is linear in depth") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Intrinsics K = test::random_intrinsics(rng, 640.0);
    const Pixel u{test::uniform(rng, 0.0, 640.0),
                  test::uniform(rng, 0.0, 480.0)};
    const double d = test::uniform(rng, 1.0, 100.0);
    const double a = test::uniform(rng, 0.1, 10.0);
    const Vec3 p1 = back_project(u, a * d, K);
    const Vec3 p2 = a * back_project(u, d, K);
    CHECK((p1 - p2).norm() <= 1e-12 * p2.norm());
  }
}

TEST_CASE("back_project_map on a constant map with identity-like K") {
  Intrinsics K{1.0, 1.0, 0.0, 0.0, 0.0};
  DepthMap d(4, 3, 5.0);
  const PointMap points = back_project_map(d, K);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 4; ++x) {
      CHECK(points.is_valid(x, y));
      CHECK(points.at(x, y) == Vec3(x * 5.0, y * 5.0, 5.0));
    }
  }
}

TEST_CASE("back_project_map hand evaluation on a 2x2 grid") {
  Intrinsics K{1.0, 1.0, 0.0, 0.0, 0.0};
  DepthMap d(2, 2);
  d.at(0, 0) = 1.0;
  d.at(1, 0) = 2.0;
  d.at(0, 1) = 3.0;
  d.at(1, 1) = 4.0;
  const PointMap points = back_project_map(d, K);
  CHECK(points.at(0, 0) == Vec3(0, 0, 1));
  CHECK(points.at(1, 0) == Vec3(2, 0, 2));
  CHECK(points.at(0, 1) == Vec3(0, 3, 3));
  CHECK(points.at(1, 1) == Vec3(4, 4, 4));
}

TEST_CASE("back_project_map preserves the validity mask") {
  Intrinsics K{10.0, 10.0, 2.0, 2.0, 0.0};
  DepthMap d(3, 3, 7.0);
  d.set_invalid(1, 2);
  const PointMap points = back_project_map(d, K);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x)
      CHECK(points.is_valid(x, y) == (x != 1 || y != 2));
}

TEST_CASE("back_project_map matches per-pixel back_project bitwise") {
  std::mt19937_64 rng(23);
  const Intrinsics K = test::random_intrinsics(rng, 8.0);
  const DepthMap d = test::random_depth(rng, 8, 6, 5.0, 100.0, 0.2);
  const PointMap points = back_project_map(d, K);
  for (int y = 0; y < d.height(); ++y) {
    for (int x = 0; x < d.width(); ++x) {
      if (!d.is_valid(x, y)) {
        CHECK(!points.is_valid(x, y));
        continue;
      }
      const Vec3 expected =
          back_project(Pixel{double(x), double(y)}, d.at(x, y), K);
      CHECK(points.at(x, y).x() == expected.x());
      CHECK(points.at(x, y).y() == expected.y());
      CHECK(points.at(x, y).z() == expected.z());
    }
  }
}

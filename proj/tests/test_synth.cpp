#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opd/surface.hpp"
#include "opd/synth.hpp"
#include "test_util.hpp"

using namespace opd;

namespace {

// Solves Z = z0 + a sin(fx_w x(X,Z)) sin(fy_w y(Y,Z)) by fixed point; used
// to differentiate the sinusoid surface numerically, independent of the
// chain rule in analytic_normal.
double solve_sinusoid_z(const SinusoidScene& s, const Intrinsics& K, double X,
                        double Y, double z_init) {
  double z = z_init;
  for (int i = 0; i < 200; ++i) {
    const double px = (K.fx * X + K.skew * Y) / z + K.cx;
    const double py = K.fy * Y / z + K.cy;
    const double next = s.base_depth + s.amplitude * std::sin(s.freq_x * px) *
                                           std::sin(s.freq_y * py);
    if (std::abs(next - z) < 1e-14) return next;
    z = next;
  }
  return z;
}

}  // namespace

TEST_CASE("fronto-parallel plane renders a constant map") {
  const PlaneScene plane{Vec3(0, 0, 1), 10.0};
  const Intrinsics K{50.0, 50.0, 4.0, 4.0, 0.0};
  const DepthMap d = render_depth(plane, K, 8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) CHECK(d.at(x, y) == 10.0);
}

TEST_CASE("on-axis sphere depth is center minus radius") {
  const SphereScene sphere{Vec3(0, 0, 10), 2.0};
  const Intrinsics K{100.0, 100.0, 16.0, 16.0, 0.0};
  const DepthMap d = render_depth(sphere, K, 33, 33);
  CHECK(d.at(16, 16) == 8.0);
}

TEST_CASE("rays that miss the sphere give invalid pixels") {
  // Sphere subtends ~8.6 deg; the 45-deg corners must miss it.
  const SphereScene sphere{Vec3(0, 0, 100), 15.0};
  const Intrinsics K{32.0, 32.0, 32.0, 32.0, 0.0};
  const DepthMap d = render_depth(sphere, K, 64, 64);
  CHECK(d.is_valid(32, 32));
  CHECK(!d.is_valid(0, 0));
  CHECK(!d.is_valid(63, 63));
  CHECK(d.valid_count() > 0);
  CHECK(d.valid_count() < 64 * 64);
}

TEST_CASE("scene invariants are enforced") {
  CHECK_THROWS_AS(require_valid(SurfaceScene{PlaneScene{Vec3(0, 0, 2), 5.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(require_valid(SurfaceScene{PlaneScene{Vec3(0, 0, 1), 0.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      require_valid(SurfaceScene{SphereScene{Vec3(0, 0, 5), 6.0}}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      require_valid(SurfaceScene{SinusoidScene{5.0, 6.0, 0.1, 0.1}}),
      std::invalid_argument);
}

TEST_CASE("rendered depths satisfy the implicit surface equations") {
  const Intrinsics K{40.0, 45.0, 16.0, 16.0, 0.3};
  const std::vector<SurfaceScene> scenes = {
      PlaneScene{Vec3(0.3, 0.2, 1.0).normalized(), 50.0},
      SphereScene{Vec3(3, -2, 70), 30.0},
      SinusoidScene{60.0, 3.0, 0.4, 0.3}};
  for (const SurfaceScene& scene : scenes) {
    const DepthMap d = render_depth(scene, K, 32, 32);
    const PointMap points = back_project_map(d, K);
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        if (!points.is_valid(x, y)) continue;
        const Vec3& p = points.at(x, y);
        if (const auto* plane = std::get_if<PlaneScene>(&scene))
          CHECK(std::abs(plane->normal.dot(p) - plane->offset) < 1e-8);
        else if (const auto* sphere = std::get_if<SphereScene>(&scene))
          CHECK(std::abs((p - sphere->center).norm() - sphere->radius) < 1e-8);
        else
          CHECK(std::abs(p.z() - d.at(x, y)) < 1e-12);
      }
    }
  }
}

TEST_CASE("analytic normals on plane and sphere") {
  const PlaneScene plane{Vec3(0, 0, 1), 10.0};
  const Intrinsics K{50.0, 50.0, 4.0, 4.0, 0.0};
  CHECK(analytic_normal(plane, Vec3(1, 2, 10), K) == Vec3(0, 0, 1));

  const SphereScene sphere{Vec3(0, 0, 10), 2.0};
  CHECK(analytic_normal(sphere, Vec3(0, 0, 8), K) == Vec3(0, 0, -1));
  CHECK(analytic_normal(sphere, Vec3(2, 0, 10), K) == Vec3(1, 0, 0));

  CHECK_THROWS_AS(analytic_normal(sphere, Vec3(0, 0, 5), K),
                  std::domain_error);
  CHECK_THROWS_AS(analytic_normal(plane, Vec3(0, 0, 10.001), K),
                  std::domain_error);
}

TEST_CASE("sinusoid analytic normal matches numeric implicit derivatives") {
  const SinusoidScene s{60.0, 3.0, 0.37, 0.29};
  const Intrinsics K{45.0, 50.0, 12.0, 12.0, 0.4};
  const DepthMap d = render_depth(s, K, 24, 24);
  const PointMap points = back_project_map(d, K);
  const double h = 1e-5;
  for (int y = 2; y < 24; y += 5) {
    for (int x = 3; x < 24; x += 5) {
      const Vec3& p = points.at(x, y);
      const Vec3 n = analytic_normal(s, p, K);
      const double zxp = solve_sinusoid_z(s, K, p.x() + h, p.y(), p.z());
      const double zxm = solve_sinusoid_z(s, K, p.x() - h, p.y(), p.z());
      const double zyp = solve_sinusoid_z(s, K, p.x(), p.y() + h, p.z());
      const double zym = solve_sinusoid_z(s, K, p.x(), p.y() - h, p.z());
      const Vec3 numeric =
          Vec3(-(zxp - zxm) / (2 * h), -(zyp - zym) / (2 * h), 1.0)
              .normalized();
      CHECK((n - numeric).norm() < 1e-5);
    }
  }
}

TEST_CASE("estimated normals converge to the oracle with resolution") {
  // Same 3D sinusoid sampled at doubled resolutions: frequencies halve as
  // the focal length doubles.
  std::vector<double> medians;
  for (int res : {64, 128, 256}) {
    const double scale = res / 64.0;
    const SinusoidScene s{60.0, 3.0, 0.5 / scale, 0.45 / scale};
    const Intrinsics K{60.0 * scale, 60.0 * scale, res / 2.0, res / 2.0, 0.0};
    medians.push_back(test::median(test::normal_angle_errors_deg(s, K, res)));
  }
  CHECK(medians[1] < medians[0]);
  CHECK(medians[2] < medians[1]);
}

TEST_CASE("noise with sigma 0 is the identity") {
  std::mt19937_64 rng(3);
  const DepthMap d = test::random_depth(rng, 8, 8, 5.0, 50.0, 0.1);
  const DepthMap out = add_noise(d, {0.0, 123});
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      if (!d.is_valid(x, y))
        CHECK(!out.is_valid(x, y));
      else
        CHECK(out.at(x, y) == d.at(x, y));
    }
}

TEST_CASE("noise is deterministic and seed-sensitive") {
  const DepthMap d(16, 16, 40.0);
  const DepthMap a = add_noise(d, {1.5, 99});
  const DepthMap b = add_noise(d, {1.5, 99});
  const DepthMap c = add_noise(d, {1.5, 100});
  bool any_diff = false;
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      CHECK(a.at(x, y) == b.at(x, y));
      any_diff = any_diff || a.at(x, y) != c.at(x, y);
    }
  CHECK(any_diff);
}

TEST_CASE("noise statistics at 256x256") {
  const DepthMap d(256, 256, 100.0);
  const DepthMap noisy = add_noise(d, {1.0, 7});
  double sum = 0.0, sum_sq = 0.0;
  const double n = 256.0 * 256.0;
  for (int y = 0; y < 256; ++y)
    for (int x = 0; x < 256; ++x) {
      const double delta = noisy.at(x, y) - 100.0;
      sum += delta;
      sum_sq += delta * delta;
    }
  const double mean = sum / n;
  const double stddev = std::sqrt(sum_sq / n - mean * mean);
  CHECK(std::abs(mean) < 0.02);
  CHECK(stddev > 0.95);
  CHECK(stddev < 1.05);
}

TEST_CASE("noise invalidates depths pushed to zero or below") {
  const DepthMap d(64, 64, 0.5);
  const DepthMap noisy = add_noise(d, {2.0, 5});
  int invalid = 0;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      if (!noisy.is_valid(x, y)) ++invalid;
  CHECK(invalid > 0);  // P(0.5 + 2N <= 0) ~ 40%
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      if (noisy.is_valid(x, y)) CHECK(noisy.at(x, y) > 0.0);
}

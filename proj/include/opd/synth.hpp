#pragma once

#include <cstdint>
#include <variant>

#include "opd/camera.hpp"
#include "opd/maps.hpp"

namespace opd {

// Surface n . p = offset with ||n|| = 1.
struct PlaneScene {
  Vec3 normal = Vec3(0, 0, 1);
  double offset = 0.0;  // mm
};

struct SphereScene {
  Vec3 center = Vec3::Zero();  // mm, center.z > radius
  double radius = 0.0;         // mm
};

// z(x, y) = base_depth + amplitude * sin(freq_x * x) * sin(freq_y * y),
// parameterized in pixel coordinates of the rendering camera.
struct SinusoidScene {
  double base_depth = 0.0;  // mm
  double amplitude = 0.0;   // mm
  double freq_x = 0.0;      // rad/pixel
  double freq_y = 0.0;      // rad/pixel
};

using SurfaceScene = std::variant<PlaneScene, SphereScene, SinusoidScene>;

void require_valid(const SurfaceScene& scene);

// Intersects the ray through each pixel center with the surface and stores
// the z coordinate of the nearest intersection with z > 0. Rays that miss
// give invalid pixels.
DepthMap render_depth(const SurfaceScene& scene, const Intrinsics& K,
                      int width, int height);

// Exact unit normal at an on-surface point (within 1e-6 mm, else throws).
// Plane: n. Sphere: (p - c) / r. Sinusoid: normalize((-dz/dX, -dz/dY, 1))
// with the pixel-space derivatives chained through the projection, which is
// why the intrinsics are required.
Vec3 analytic_normal(const SurfaceScene& scene, const Vec3& p,
                     const Intrinsics& K);

struct NoiseSpec {
  double sigma = 0.0;  // mm
  uint64_t seed = 0;
};

// Adds zero-mean Gaussian noise to every valid pixel using a counter-based
// generator keyed by (seed, pixel index), so results do not depend on
// evaluation order. Depths pushed to <= 0 become invalid.
DepthMap add_noise(const DepthMap& depth, const NoiseSpec& spec);

}  // namespace opd

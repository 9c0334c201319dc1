#include "opd/synth.hpp"

#include <cmath>

namespace opd {

namespace {

constexpr double kOnSurfaceTolerance = 1e-6;  // mm

void require_plane(const PlaneScene& s) {
  if (!s.normal.allFinite() || !std::isfinite(s.offset))
    throw std::invalid_argument("PlaneScene: non-finite parameters");
  if (std::abs(s.normal.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("PlaneScene: normal must be unit length");
  if (s.offset == 0.0)
    throw std::invalid_argument("PlaneScene: plane passes through the camera");
}

void require_sphere(const SphereScene& s) {
  if (!s.center.allFinite() || !std::isfinite(s.radius))
    throw std::invalid_argument("SphereScene: non-finite parameters");
  if (!(s.radius > 0.0))
    throw std::invalid_argument("SphereScene: radius must be > 0");
  if (!(s.center.z() > s.radius))
    throw std::invalid_argument(
        "SphereScene: sphere must lie wholly in front of the camera");
}

void require_sinusoid(const SinusoidScene& s) {
  for (double v : {s.base_depth, s.amplitude, s.freq_x, s.freq_y})
    if (!std::isfinite(v))
      throw std::invalid_argument("SinusoidScene: non-finite parameters");
  if (!(s.base_depth - std::abs(s.amplitude) > 0.0))
    throw std::invalid_argument(
        "SinusoidScene: base_depth - |amplitude| must be > 0");
}

// Depth (ray parameter t, which equals z since ray.z == 1) of the nearest
// plane intersection, or NaN on a miss.
double intersect_plane(const PlaneScene& s, const Vec3& ray) {
  const double denom = s.normal.dot(ray);
  if (denom == 0.0) return DepthMap::invalid_value();
  const double t = s.offset / denom;
  return t > 0.0 && std::isfinite(t) ? t : DepthMap::invalid_value();
}

// Stable quadratic: q = -(b + sign(b) sqrt(disc)) / 2 avoids cancellation
// when rays graze the sphere.
double intersect_sphere(const SphereScene& s, const Vec3& ray) {
  const double a = ray.squaredNorm();
  const double b = -2.0 * ray.dot(s.center);
  const double c = s.center.squaredNorm() - s.radius * s.radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return DepthMap::invalid_value();
  const double sqrt_disc = std::sqrt(disc);
  const double q = b >= 0.0 ? -0.5 * (b + sqrt_disc) : -0.5 * (b - sqrt_disc);
  double t_near = DepthMap::invalid_value();
  for (double t : {q / a, q != 0.0 ? c / q : DepthMap::invalid_value()}) {
    if (!(t > 0.0) || !std::isfinite(t)) continue;
    if (!std::isfinite(t_near) || t < t_near) t_near = t;
  }
  return t_near;
}

// splitmix64 finalizer; a solid stateless mixer for counter-based draws.
uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Standard normal via Box-Muller on two counter-derived uniforms; keyed by
// (seed, counter) only, so the draw is independent of evaluation order.
double counter_gaussian(uint64_t seed, uint64_t counter) {
  const uint64_t base = mix64(seed);
  const uint64_t r1 = mix64(base ^ mix64(2 * counter));
  const uint64_t r2 = mix64(base ^ mix64(2 * counter + 1));
  const double u1 = (static_cast<double>(r1 >> 11) + 1.0) * 0x1p-53;  // (0,1]
  const double u2 = static_cast<double>(r2 >> 11) * 0x1p-53;          // [0,1)
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
}

}  // namespace

void require_valid(const SurfaceScene& scene) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PlaneScene>)
          require_plane(s);
        else if constexpr (std::is_same_v<T, SphereScene>)
          require_sphere(s);
        else
          require_sinusoid(s);
      },
      scene);
}

DepthMap render_depth(const SurfaceScene& scene, const Intrinsics& K,
                      int width, int height) {
  require_valid(scene);
  K.require_valid();
  DepthMap depth(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double d;
      if (const auto* plane = std::get_if<PlaneScene>(&scene)) {
        d = intersect_plane(*plane, K.ray(x, y));
      } else if (const auto* sphere = std::get_if<SphereScene>(&scene)) {
        d = intersect_sphere(*sphere, K.ray(x, y));
      } else {
        const auto& sin_scene = std::get<SinusoidScene>(scene);
        d = sin_scene.base_depth + sin_scene.amplitude *
                                       std::sin(sin_scene.freq_x * x) *
                                       std::sin(sin_scene.freq_y * y);
      }
      depth.at(x, y) = d;
    }
  }
  return depth;
}

Vec3 analytic_normal(const SurfaceScene& scene, const Vec3& p,
                     const Intrinsics& K) {
  require_valid(scene);
  if (const auto* plane = std::get_if<PlaneScene>(&scene)) {
    if (std::abs(plane->normal.dot(p) - plane->offset) > kOnSurfaceTolerance)
      throw std::domain_error("analytic_normal: point is off the plane");
    return plane->normal;
  }
  if (const auto* sphere = std::get_if<SphereScene>(&scene)) {
    if (std::abs((p - sphere->center).norm() - sphere->radius) >
        kOnSurfaceTolerance)
      throw std::domain_error("analytic_normal: point is off the sphere");
    return (p - sphere->center) / sphere->radius;
  }
  const auto& s = std::get<SinusoidScene>(scene);
  K.require_valid();
  const Pixel u = project(p, K);
  const double z_surface = s.base_depth + s.amplitude *
                                              std::sin(s.freq_x * u.x) *
                                              std::sin(s.freq_y * u.y);
  if (std::abs(p.z() - z_surface) > kOnSurfaceTolerance)
    throw std::domain_error("analytic_normal: point is off the sinusoid");

  // Implicit surface F(X,Y,Z) = Z - z(x(X,Y,Z), y(X,Y,Z)) = 0 with pixel
  // coordinates x = (fx X + skew Y)/Z + cx, y = fy Y/Z + cy. The normal is
  // normalize((-dZ/dX, -dZ/dY, 1)) with dZ/dX = -F_X / F_Z etc.
  const double z = p.z();
  const double gx = s.amplitude * s.freq_x * std::cos(s.freq_x * u.x) *
                    std::sin(s.freq_y * u.y);
  const double gy = s.amplitude * s.freq_y * std::sin(s.freq_x * u.x) *
                    std::cos(s.freq_y * u.y);
  const double fx_over_z = K.fx / z;
  const double fy_over_z = K.fy / z;
  const double f_x = -gx * fx_over_z;
  const double f_y = -gx * K.skew / z - gy * fy_over_z;
  const double f_z = 1.0 + gx * (K.fx * p.x() + K.skew * p.y()) / (z * z) +
                     gy * K.fy * p.y() / (z * z);
  const Vec3 n(f_x / f_z, f_y / f_z, 1.0);
  return n.normalized();
}

DepthMap add_noise(const DepthMap& depth, const NoiseSpec& spec) {
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma))
    throw std::invalid_argument("NoiseSpec: sigma must be finite and >= 0");
  DepthMap out = depth;
  if (spec.sigma == 0.0) return out;
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      if (!depth.is_valid(x, y)) continue;
      const uint64_t index =
          static_cast<uint64_t>(y) * static_cast<uint64_t>(depth.width()) + x;
      const double noisy =
          depth.at(x, y) + spec.sigma * counter_gaussian(spec.seed, index);
      out.at(x, y) = noisy > 0.0 ? noisy : DepthMap::invalid_value();
    }
  }
  return out;
}

}  // namespace opd

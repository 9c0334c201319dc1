#include "opd/camera.hpp"

namespace opd {

Vec3 back_project(const Pixel& u, double depth_mm, const Intrinsics& K) {
  K.require_valid();
  if (!std::isfinite(depth_mm) || depth_mm <= 0.0)
    throw std::invalid_argument("back_project: depth must be finite and > 0");
  return depth_mm * K.ray(u.x, u.y);
}

Pixel project(const Vec3& p, const Intrinsics& K) {
  K.require_valid();
  if (!(p.z() > 0.0))
    throw std::invalid_argument("project: point is behind the camera");
  const double inv_z = 1.0 / p.z();
  return Pixel{(K.fx * p.x() + K.skew * p.y()) * inv_z + K.cx,
               K.fy * p.y() * inv_z + K.cy};
}

PointMap back_project_map(const DepthMap& depth, const Intrinsics& K) {
  K.require_valid();
  if (depth.empty())
    throw std::invalid_argument("back_project_map: empty depth map");
  PointMap points(depth.width(), depth.height());
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      if (!depth.is_valid(x, y)) continue;
      points.at(x, y) = depth.at(x, y) * K.ray(x, y);
      points.set_valid(x, y, true);
    }
  }
  return points;
}

}  // namespace opd

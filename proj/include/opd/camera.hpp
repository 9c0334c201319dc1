#pragma once

#include <Eigen/Core>

#include "opd/maps.hpp"

namespace opd {

// Continuous pixel coordinates. Integer (x, y) refers to the pixel center,
// x = column, y = row, origin at the top-left.
struct Pixel {
  double x = 0.0;
  double y = 0.0;
};

// Pinhole intrinsics K = [[fx, skew, cx], [0, fy, cy], [0, 0, 1]].
// All quantities in pixels; fx, fy > 0 keeps K invertible.
struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double skew = 0.0;

  bool valid() const {
    return std::isfinite(fx) && std::isfinite(fy) && std::isfinite(cx) &&
           std::isfinite(cy) && std::isfinite(skew) && fx > 0.0 && fy > 0.0;
  }

  void require_valid() const {
    if (!valid())
      throw std::invalid_argument(
          "Intrinsics: fx, fy must be > 0 and all fields finite");
  }

  Eigen::Matrix3d matrix() const {
    Eigen::Matrix3d k;
    k << fx, skew, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
    return k;
  }

  // K^-1 [x, y, 1]^T, closed form.
  Vec3 ray(double x, double y) const {
    const double ry = (y - cy) / fy;
    const double rx = (x - cx) / fx - skew * ry / fx;
    return Vec3(rx, ry, 1.0);
  }
};

// d * K^-1 [x, y, 1]^T. The z component of the result equals d exactly.
Vec3 back_project(const Pixel& u, double depth_mm, const Intrinsics& K);

// Perspective projection (K p) / p.z, first two components. p.z must be > 0.
Pixel project(const Vec3& p, const Intrinsics& K);

// Per-pixel back-projection at integer pixel centers. Invalid depth pixels
// become invalid points; the validity mask is preserved.
PointMap back_project_map(const DepthMap& depth, const Intrinsics& K);

}  // namespace opd

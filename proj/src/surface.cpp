#include "opd/surface.hpp"

#include <algorithm>

namespace opd {

namespace {

// 1/8-normalized Sobel taps, indexed [dy + 1][dx + 1]. The normalization
// makes the response the exact unit-spacing derivative on affine inputs.
constexpr double kSobelX[3][3] = {{-0.125, 0.0, 0.125},
                                  {-0.25, 0.0, 0.25},
                                  {-0.125, 0.0, 0.125}};
constexpr double kSobelY[3][3] = {{-0.125, -0.25, -0.125},
                                  {0.0, 0.0, 0.0},
                                  {0.125, 0.25, 0.125}};

inline int clamp_coord(int v, int hi) { return std::clamp(v, 0, hi); }

}  // namespace

SobelGradients sobel_gradients(const PointMap& points) {
  const int w = points.width();
  const int h = points.height();
  SobelGradients out{VectorMap(w, h), VectorMap(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      Vec3 gx = Vec3::Zero();
      Vec3 gy = Vec3::Zero();
      bool neighborhood_valid = true;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int sx = clamp_coord(x + dx, w - 1);
          const int sy = clamp_coord(y + dy, h - 1);
          if (!points.is_valid(sx, sy)) {
            neighborhood_valid = false;
            break;
          }
          const Vec3& p = points.at(sx, sy);
          gx += kSobelX[dy + 1][dx + 1] * p;
          gy += kSobelY[dy + 1][dx + 1] * p;
        }
        if (!neighborhood_valid) break;
      }
      if (!neighborhood_valid) continue;
      out.grad_x.at(x, y) = gx;
      out.grad_y.at(x, y) = gy;
      out.grad_x.set_valid(x, y, true);
      out.grad_y.set_valid(x, y, true);
    }
  }
  return out;
}

NormalMap estimate_normals(const DepthMap& depth, const Intrinsics& K) {
  const PointMap points = back_project_map(depth, K);
  const SobelGradients grads = sobel_gradients(points);
  NormalMap normals(depth.width(), depth.height());
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      if (!grads.grad_x.is_valid(x, y)) continue;
      normals.at(x, y) = grads.grad_x.at(x, y).cross(grads.grad_y.at(x, y));
      normals.set_valid(x, y, true);
    }
  }
  return normals;
}

NormalMap unit_normals(const NormalMap& raw) {
  NormalMap out(raw.width(), raw.height());
  for (int y = 0; y < raw.height(); ++y) {
    for (int x = 0; x < raw.width(); ++x) {
      if (!raw.is_valid(x, y)) continue;
      const double norm = raw.at(x, y).norm();
      if (norm <= kNormalEpsilon) continue;
      out.at(x, y) = raw.at(x, y) / norm;
      out.set_valid(x, y, true);
    }
  }
  return out;
}

NormalMap flip_to_camera(const NormalMap& normals) {
  NormalMap out = normals;
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x)
      if (out.is_valid(x, y) && out.at(x, y).z() > 0.0)
        out.at(x, y) = -out.at(x, y);
  return out;
}

}  // namespace opd

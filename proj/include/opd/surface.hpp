#pragma once

#include "opd/camera.hpp"
#include "opd/maps.hpp"

namespace opd {

// Raw cross products below this norm (mm^2) count as degenerate and are
// excluded from unit-normal queries.
inline constexpr double kNormalEpsilon = 1e-12;

struct SobelGradients {
  VectorMap grad_x;
  VectorMap grad_y;
};

// 3x3 Sobel derivative of each channel of the point map, 1/8-normalized so
// the response equals the unit-spacing derivative on affine inputs. Borders
// use replicate padding. An output pixel is valid only if all 9 pixels of
// its (replicated) 3x3 neighborhood are valid.
SobelGradients sobel_gradients(const PointMap& points);

// Raw surface normals h = grad_x x grad_y of the back-projected point map.
// Vectors are unnormalized (mm^2 scale); orientation is +z for
// fronto-parallel surfaces in the x-right/y-down/z-forward frame.
NormalMap estimate_normals(const DepthMap& depth, const Intrinsics& K);

// h / ||h||_2 where ||h|| > kNormalEpsilon; degenerate pixels become invalid.
NormalMap unit_normals(const NormalMap& raw);

// Negates vectors with h_z > 0 so normals face the camera. Export aesthetics
// only; losses use the raw orientation.
NormalMap flip_to_camera(const NormalMap& normals);

}  // namespace opd

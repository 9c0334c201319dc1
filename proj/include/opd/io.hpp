#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "opd/camera.hpp"
#include "opd/maps.hpp"

namespace opd {

struct OrientedPoint {
  Vec3 position = Vec3::Zero();      // mm
  Vec3 normal = Vec3::Zero();        // unit length (or 0,0,0 placeholder)
  std::array<uint8_t, 3> color = {0, 0, 0};
};

struct OrientedPointCloud {
  std::vector<OrientedPoint> points;
  bool has_color = false;
};

// Grayscale PFM ("Pf"): header "Pf\n<w> <h>\n<scale>\n" then w*h 32-bit
// floats in bottom-to-top row order; a negative scale means little-endian.
// Reading maps non-finite and <= 0 samples to invalid; writing stores
// invalid pixels as 0.0 with scale -1.0.
DepthMap read_pfm(std::string_view bytes);
std::string write_pfm(const DepthMap& depth);

// Line-oriented "key = value" text with keys fx, fy, cx, cy and optional
// skew; '#' starts a comment. Writing uses 17 significant digits so the
// round trip is exact.
Intrinsics read_intrinsics(std::string_view text);
std::string write_intrinsics(const Intrinsics& K);

// ASCII PLY with x y z nx ny nz properties (plus uchar red green blue when
// colored), 9 significant digits per coordinate.
std::string export_ply(const OrientedPointCloud& cloud);

// Rows of comma-separated depths; "nan" or an empty cell marks an invalid
// pixel. Ragged rows and unparseable cells are errors.
DepthMap read_csv_depth(std::string_view text);

// Builds the oriented point cloud of a depth map: back-projected positions
// with unit normals where the normal is valid. With include_unoriented,
// points with invalid normals are kept with placeholder normal (0,0,0).
OrientedPointCloud oriented_cloud(const DepthMap& depth, const Intrinsics& K,
                                  bool include_unoriented = false);

// Whole-file helpers. write_file_atomic writes to a temp file in the target
// directory and renames it into place, so partial outputs never remain.
std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::string_view data);

// printf-style %.17g / %.9g formatting used by every text serialization.
std::string format_g17(double v);
std::string format_g9(double v);

}  // namespace opd

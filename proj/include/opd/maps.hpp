#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace opd {

using Vec3 = Eigen::Vector3d;

// Row-major depth grid in mm. A pixel is valid iff its value is finite and
// strictly positive; everything else (NaN, inf, 0, negatives) is invalid.
class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int width, int height, double fill = invalid_value())
      : width_(width), height_(height) {
    if (width < 1 || height < 1)
      throw std::invalid_argument("DepthMap: width and height must be >= 1");
    values_.assign(static_cast<size_t>(width) * height, fill);
  }

  static constexpr double invalid_value() {
    return std::numeric_limits<double>::quiet_NaN();
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return values_.empty(); }

  double at(int x, int y) const { return values_[index(x, y)]; }
  double& at(int x, int y) { return values_[index(x, y)]; }

  bool is_valid(int x, int y) const {
    const double d = at(x, y);
    return std::isfinite(d) && d > 0.0;
  }

  void set_invalid(int x, int y) { at(x, y) = invalid_value(); }

  int valid_count() const {
    int n = 0;
    for (int y = 0; y < height_; ++y)
      for (int x = 0; x < width_; ++x)
        if (is_valid(x, y)) ++n;
    return n;
  }

  bool same_shape(const DepthMap& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

 private:
  size_t index(int x, int y) const {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_);
    return static_cast<size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

// Grid of 3-vectors with an explicit validity mask. Used for point maps,
// normal maps and intermediate gradient fields.
class VectorMap {
 public:
  VectorMap() = default;
  VectorMap(int width, int height)
      : width_(width), height_(height),
        values_(static_cast<size_t>(width) * height, Vec3::Zero()),
        valid_(static_cast<size_t>(width) * height, 0) {
    if (width < 1 || height < 1)
      throw std::invalid_argument("VectorMap: width and height must be >= 1");
  }

  int width() const { return width_; }
  int height() const { return height_; }

  const Vec3& at(int x, int y) const { return values_[index(x, y)]; }
  Vec3& at(int x, int y) { return values_[index(x, y)]; }

  bool is_valid(int x, int y) const { return valid_[index(x, y)] != 0; }
  void set_valid(int x, int y, bool v) { valid_[index(x, y)] = v ? 1 : 0; }

  int valid_count() const {
    int n = 0;
    for (uint8_t v : valid_) n += v;
    return n;
  }

  bool same_shape(const VectorMap& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

 private:
  size_t index(int x, int y) const {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_);
    return static_cast<size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Vec3> values_;
  std::vector<uint8_t> valid_;
};

using PointMap = VectorMap;
using NormalMap = VectorMap;

// Scalar grid with an explicit validity mask (values may be any finite
// number, unlike DepthMap where validity is encoded in the value).
class ScalarMap {
 public:
  ScalarMap() = default;
  ScalarMap(int width, int height)
      : width_(width), height_(height),
        values_(static_cast<size_t>(width) * height, 0.0),
        valid_(static_cast<size_t>(width) * height, 0) {
    if (width < 1 || height < 1)
      throw std::invalid_argument("ScalarMap: width and height must be >= 1");
  }

  int width() const { return width_; }
  int height() const { return height_; }

  double at(int x, int y) const { return values_[index(x, y)]; }
  double& at(int x, int y) { return values_[index(x, y)]; }

  bool is_valid(int x, int y) const { return valid_[index(x, y)] != 0; }
  void set_valid(int x, int y, bool v) { valid_[index(x, y)] = v ? 1 : 0; }

 private:
  size_t index(int x, int y) const {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_);
    return static_cast<size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
  std::vector<uint8_t> valid_;
};

// Per-pixel d(loss)/d(depth). Invalid exactly where the predicted depth
// pixel is invalid; zero (not invalid) at valid pixels with no contribution.
using GradientMap = ScalarMap;

}  // namespace opd

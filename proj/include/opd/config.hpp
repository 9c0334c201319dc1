#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "opd/fit.hpp"
#include "opd/op_loss.hpp"
#include "opd/synth.hpp"

namespace opd {

// Parses line-oriented "key = value" text ('#' comments, blank lines
// allowed). Duplicate keys are errors; messages carry the line number.
std::map<std::string, std::string> parse_key_values(std::string_view text);

// Sectioned run configuration shared by the CLI and the fit experiment.
// Recognized keys:
//   camera.fx .fy .cx .cy .skew        (pixels)
//   image.width image.height           (pixels)
//   scene.type = plane|sphere|sinusoid
//   scene.normal = nx,ny,nz  scene.offset           (plane, mm)
//   scene.center = x,y,z     scene.radius           (sphere, mm)
//   scene.base_depth scene.amplitude scene.freq_x scene.freq_y
//                                       (sinusoid, mm / rad per pixel)
//   noise.sigma (mm)  noise.seed
//   loss.alpha1 .alpha2 .beta .lambda .similarity_mode .reduction
//   fit.learning_rate (mm) .iterations .record_every .seed
struct RunConfig {
  std::optional<Intrinsics> camera;
  std::optional<int> width, height;
  std::optional<SurfaceScene> scene;
  std::optional<NoiseSpec> noise;
  OpLossConfig loss;
  FitConfig fit;

  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::string& path);
};

SimilarityMode parse_similarity_mode(std::string_view s);
Reduction parse_reduction(std::string_view s);
std::string to_string(SimilarityMode mode);
std::string to_string(Reduction reduction);

}  // namespace opd

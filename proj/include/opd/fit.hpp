#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opd/metrics.hpp"
#include "opd/op_loss.hpp"

namespace opd {

struct FitConfig {
  double learning_rate = 1.0;  // mm per unit gradient
  int iterations = 0;
  OpLossConfig loss;           // reduction is forced to kMean inside fit
  int record_every = 1;        // iteration stride for trajectory samples
  uint64_t seed = 0;           // seed used to build the noisy init (metadata)

  void require_valid() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
      throw std::invalid_argument("FitConfig: learning_rate must be > 0");
    if (iterations < 0)
      throw std::invalid_argument("FitConfig: iterations must be >= 0");
    if (record_every < 1)
      throw std::invalid_argument("FitConfig: record_every must be >= 1");
    loss.require_valid();
  }
};

struct TrajectorySample {
  int iteration = 0;
  LossBreakdown loss;
  double mae = 0.0;   // mm
  double rmse = 0.0;  // mm
  double mean_normal_angle_deg = 0.0;  // vs target normals, up to sign
};

struct FitResult {
  DepthMap final_depth;
  std::vector<TrajectorySample> trajectory;
};

// Plain gradient descent on every valid depth pixel: d <- d - lr * dL/dd,
// clamped to >= 1e-3 mm. Pixels invalid in init stay invalid and untouched.
// The trajectory starts with a pre-step sample at iteration 0 and then
// records every record_every-th iteration plus the final one.
FitResult fit(const DepthMap& init, const DepthMap& target,
              const Intrinsics& K, const FitConfig& cfg);

struct ComparisonResult {
  FitResult a;
  FitResult b;
};

// Runs fit under both configs from the identical init. The configs must
// share iterations and record_every so rows pair up.
ComparisonResult compare(const DepthMap& init, const DepthMap& target,
                         const Intrinsics& K, const FitConfig& cfg_a,
                         const FitConfig& cfg_b);

// "iteration, image_l1, p2p, n2n_align, n2n_reg, op, total, mae, rmse,
// normal_angle_deg" with 17 significant digits.
std::string trajectory_csv(const FitResult& result);

// Side-by-side table of two trajectories, columns suffixed _a and _b.
std::string comparison_csv(const ComparisonResult& result);

}  // namespace opd

#include "opd/fit.hpp"

#include <cmath>

#include "opd/io.hpp"
#include "opd/surface.hpp"

namespace opd {

namespace {

constexpr double kDepthFloor = 1e-3;  // mm, keeps pixels from going invalid

// Mean angle in degrees between unit normals, up to global sign, over
// pixels valid in both maps. NaN when no pixel qualifies.
double mean_normal_angle_deg(const NormalMap& pred_units,
                             const NormalMap& target_units) {
  double sum = 0.0;
  long long count = 0;
  for (int y = 0; y < pred_units.height(); ++y) {
    for (int x = 0; x < pred_units.width(); ++x) {
      if (!pred_units.is_valid(x, y) || !target_units.is_valid(x, y)) continue;
      const double dot =
          std::abs(pred_units.at(x, y).dot(target_units.at(x, y)));
      sum += std::acos(std::min(dot, 1.0)) * 180.0 / M_PI;
      ++count;
    }
  }
  return count > 0 ? sum / static_cast<double>(count)
                   : std::numeric_limits<double>::quiet_NaN();
}

// mae/rmse as diagnostics: NaN instead of an error when nothing overlaps.
void depth_errors(const DepthMap& pred, const DepthMap& target, double* out_mae,
                  double* out_rmse) {
  double sum_abs = 0.0, sum_sq = 0.0;
  long long count = 0;
  for (int y = 0; y < pred.height(); ++y) {
    for (int x = 0; x < pred.width(); ++x) {
      if (!pred.is_valid(x, y) || !target.is_valid(x, y)) continue;
      const double e = std::abs(pred.at(x, y) - target.at(x, y));
      sum_abs += e;
      sum_sq += e * e;
      ++count;
    }
  }
  if (count == 0) {
    *out_mae = std::numeric_limits<double>::quiet_NaN();
    *out_rmse = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  *out_mae = sum_abs / static_cast<double>(count);
  *out_rmse = std::sqrt(sum_sq / static_cast<double>(count));
}

TrajectorySample make_sample(int iteration, const DepthMap& current,
                             const DepthMap& target, const Intrinsics& K,
                             const OpLossConfig& loss_cfg,
                             const NormalMap& target_units) {
  TrajectorySample s;
  s.iteration = iteration;
  s.loss = op_loss(current, target, K, loss_cfg);
  depth_errors(current, target, &s.mae, &s.rmse);
  s.mean_normal_angle_deg = mean_normal_angle_deg(
      unit_normals(estimate_normals(current, K)), target_units);
  return s;
}

}  // namespace

FitResult fit(const DepthMap& init, const DepthMap& target,
              const Intrinsics& K, const FitConfig& cfg) {
  if (!init.same_shape(target))
    throw std::invalid_argument("fit: init and target shapes differ");
  K.require_valid();
  cfg.require_valid();

  OpLossConfig loss_cfg = cfg.loss;
  loss_cfg.reduction = Reduction::kMean;  // learning rate decoupled from size

  const NormalMap target_units = unit_normals(estimate_normals(target, K));

  FitResult result;
  result.final_depth = init;
  DepthMap& current = result.final_depth;
  result.trajectory.push_back(
      make_sample(0, current, target, K, loss_cfg, target_units));

  for (int it = 1; it <= cfg.iterations; ++it) {
    const GradientMap grad = op_loss_gradient(current, target, K, loss_cfg);
    for (int y = 0; y < current.height(); ++y) {
      for (int x = 0; x < current.width(); ++x) {
        if (!init.is_valid(x, y)) continue;  // invalid pixels stay untouched
        const double next =
            current.at(x, y) - cfg.learning_rate * grad.at(x, y);
        current.at(x, y) = std::max(next, kDepthFloor);
      }
    }
    if (it % cfg.record_every == 0 || it == cfg.iterations)
      result.trajectory.push_back(
          make_sample(it, current, target, K, loss_cfg, target_units));
  }
  return result;
}

ComparisonResult compare(const DepthMap& init, const DepthMap& target,
                         const Intrinsics& K, const FitConfig& cfg_a,
                         const FitConfig& cfg_b) {
  if (cfg_a.iterations != cfg_b.iterations ||
      cfg_a.record_every != cfg_b.record_every)
    throw std::invalid_argument(
        "compare: configs must share iterations and record_every");
  return ComparisonResult{fit(init, target, K, cfg_a),
                          fit(init, target, K, cfg_b)};
}

namespace {

constexpr const char* kTrajectoryColumns =
    "image_l1,p2p,n2n_align,n2n_reg,op,total,mae,rmse,normal_angle_deg";

std::string sample_fields(const TrajectorySample& s) {
  std::string out;
  out += format_g17(s.loss.image_l1) + ",";
  out += format_g17(s.loss.p2p) + ",";
  out += format_g17(s.loss.n2n_align) + ",";
  out += format_g17(s.loss.n2n_reg) + ",";
  out += format_g17(s.loss.op) + ",";
  out += format_g17(s.loss.total) + ",";
  out += format_g17(s.mae) + ",";
  out += format_g17(s.rmse) + ",";
  out += format_g17(s.mean_normal_angle_deg);
  return out;
}

}  // namespace

std::string trajectory_csv(const FitResult& result) {
  std::string out = std::string("iteration,") + kTrajectoryColumns + "\n";
  for (const TrajectorySample& s : result.trajectory)
    out += std::to_string(s.iteration) + "," + sample_fields(s) + "\n";
  return out;
}

std::string comparison_csv(const ComparisonResult& result) {
  std::string columns_a = kTrajectoryColumns;
  std::string columns_b = kTrajectoryColumns;
  const auto suffix = [](std::string cols, const char* tag) {
    std::string out;
    size_t start = 0;
    while (start <= cols.size()) {
      const size_t comma = cols.find(',', start);
      out += cols.substr(start, comma == std::string::npos ? cols.size() - start
                                                           : comma - start);
      out += tag;
      if (comma == std::string::npos) break;
      out += ',';
      start = comma + 1;
    }
    return out;
  };
  std::string out = "iteration," + suffix(columns_a, "_a") + "," +
                    suffix(columns_b, "_b") + "\n";
  const size_t rows =
      std::min(result.a.trajectory.size(), result.b.trajectory.size());
  for (size_t i = 0; i < rows; ++i) {
    out += std::to_string(result.a.trajectory[i].iteration) + "," +
           sample_fields(result.a.trajectory[i]) + "," +
           sample_fields(result.b.trajectory[i]) + "\n";
  }
  return out;
}

}  // namespace opd

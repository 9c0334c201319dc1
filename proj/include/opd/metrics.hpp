#pragma once

#include <string>
#include <vector>

#include "opd/maps.hpp"

namespace opd {

struct MetricsReport {
  std::string name;
  double mae = 0.0;   // mm
  double rmse = 0.0;  // mm
  long long valid_pixel_count = 0;
  // Carried so reports can be aggregated without revisiting pixels.
  double sum_abs_error = 0.0;
  double sum_sq_error = 0.0;
};

// Mean |pred - gt| in mm over jointly valid pixels. Throws when shapes
// differ or no pixel is jointly valid.
double mae(const DepthMap& pred, const DepthMap& gt);

// Root mean square error in mm over jointly valid pixels; errors as mae.
double rmse(const DepthMap& pred, const DepthMap& gt);

MetricsReport compute_metrics(const DepthMap& pred, const DepthMap& gt,
                              std::string name);

// Pixel-count-weighted aggregation: MAE as the weighted mean of absolute
// errors, RMSE as the square root of the weighted mean of squared errors.
MetricsReport aggregate(const std::vector<MetricsReport>& reports,
                        std::string name = "ALL");

// "name, mae_mm, rmse_mm, valid_pixels" header plus one row per report,
// 17 significant digits.
std::string metrics_csv(const std::vector<MetricsReport>& reports);

}  // namespace opd

#include "opd/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "opd/io.hpp"

namespace opd {

namespace {

struct ErrorSums {
  double sum_abs = 0.0;
  double sum_sq = 0.0;
  long long count = 0;
};

ErrorSums accumulate_errors(const DepthMap& pred, const DepthMap& gt) {
  if (!pred.same_shape(gt))
    throw std::invalid_argument("metrics: depth map shapes differ");
  ErrorSums sums;
  for (int y = 0; y < pred.height(); ++y) {
    for (int x = 0; x < pred.width(); ++x) {
      if (!pred.is_valid(x, y) || !gt.is_valid(x, y)) continue;
      const double err = std::abs(pred.at(x, y) - gt.at(x, y));
      sums.sum_abs += err;
      sums.sum_sq += err * err;
      ++sums.count;
    }
  }
  if (sums.count == 0)
    throw std::runtime_error("metrics: no jointly valid pixel");
  return sums;
}

}  // namespace

double mae(const DepthMap& pred, const DepthMap& gt) {
  const ErrorSums sums = accumulate_errors(pred, gt);
  return sums.sum_abs / static_cast<double>(sums.count);
}

double rmse(const DepthMap& pred, const DepthMap& gt) {
  const ErrorSums sums = accumulate_errors(pred, gt);
  return std::sqrt(sums.sum_sq / static_cast<double>(sums.count));
}

MetricsReport compute_metrics(const DepthMap& pred, const DepthMap& gt,
                              std::string name) {
  const ErrorSums sums = accumulate_errors(pred, gt);
  MetricsReport report;
  report.name = std::move(name);
  report.valid_pixel_count = sums.count;
  report.sum_abs_error = sums.sum_abs;
  report.sum_sq_error = sums.sum_sq;
  report.mae = sums.sum_abs / static_cast<double>(sums.count);
  report.rmse = std::sqrt(sums.sum_sq / static_cast<double>(sums.count));
  return report;
}

MetricsReport aggregate(const std::vector<MetricsReport>& reports,
                        std::string name) {
  if (reports.empty())
    throw std::invalid_argument("aggregate: empty report list");
  MetricsReport out;
  out.name = std::move(name);
  for (const MetricsReport& r : reports) {
    out.valid_pixel_count += r.valid_pixel_count;
    out.sum_abs_error += r.sum_abs_error;
    out.sum_sq_error += r.sum_sq_error;
  }
  if (out.valid_pixel_count == 0)
    throw std::runtime_error("aggregate: zero total pixel count");
  out.mae = out.sum_abs_error / static_cast<double>(out.valid_pixel_count);
  out.rmse =
      std::sqrt(out.sum_sq_error / static_cast<double>(out.valid_pixel_count));
  return out;
}

std::string metrics_csv(const std::vector<MetricsReport>& reports) {
  std::string out = "name,mae_mm,rmse_mm,valid_pixels\n";
  for (const MetricsReport& r : reports) {
    out += r.name;
    out += ',';
    out += format_g17(r.mae);
    out += ',';
    out += format_g17(r.rmse);
    out += ',';
    out += std::to_string(r.valid_pixel_count);
    out += '\n';
  }
  return out;
}

}  // namespace opd

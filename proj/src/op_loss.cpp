#include "opd/op_loss.hpp"

#include <algorithm>

#include "opd/surface.hpp"

namespace opd {

namespace {

// L1 subgradient convention: sign(0) = 0.
inline double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void require_same_shape(const DepthMap& pred, const DepthMap& gt) {
  if (!pred.same_shape(gt))
    throw std::invalid_argument("depth map shapes differ");
}

// Same taps as surface.cpp, indexed [dy + 1][dx + 1].
constexpr double kSobelX[3][3] = {{-0.125, 0.0, 0.125},
                                  {-0.25, 0.0, 0.25},
                                  {-0.125, 0.0, 0.125}};
constexpr double kSobelY[3][3] = {{-0.125, -0.25, -0.125},
                                  {0.0, 0.0, 0.0},
                                  {0.125, 0.25, 0.125}};

struct NormalTermMasks {
  std::vector<uint8_t> align;  // row-major, pixels entering the align term
  std::vector<uint8_t> reg;    // pixels entering the reg term
  long long align_count = 0;
  long long reg_count = 0;
};

NormalTermMasks normal_term_masks(const NormalMap& pred_raw,
                                  const NormalMap& gt_raw,
                                  SimilarityMode mode) {
  const int w = pred_raw.width();
  const int h = pred_raw.height();
  NormalTermMasks masks;
  masks.align.assign(static_cast<size_t>(w) * h, 0);
  masks.reg.assign(static_cast<size_t>(w) * h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      if (pred_raw.is_valid(x, y)) {
        masks.reg[i] = 1;
        ++masks.reg_count;
        if (gt_raw.is_valid(x, y)) {
          bool ok = true;
          if (mode == SimilarityMode::kNormalizedAlign)
            ok = pred_raw.at(x, y).norm() > kNormalEpsilon &&
                 gt_raw.at(x, y).norm() > kNormalEpsilon;
          if (ok) {
            masks.align[i] = 1;
            ++masks.align_count;
          }
        }
      }
    }
  }
  return masks;
}

}  // namespace

double point_distance_loss(const DepthMap& pred, const DepthMap& gt,
                           const Intrinsics& K, Reduction reduction,
                           PointDistanceStats* stats) {
  require_same_shape(pred, gt);
  K.require_valid();
  double sum = 0.0;
  long long count = 0;
  for (int y = 0; y < pred.height(); ++y) {
    for (int x = 0; x < pred.width(); ++x) {
      if (!pred.is_valid(x, y) || !gt.is_valid(x, y)) continue;
      const Vec3 ray = K.ray(x, y);
      sum += (pred.at(x, y) * ray - gt.at(x, y) * ray).cwiseAbs().sum();
      ++count;
    }
  }
  if (stats) {
    stats->count = count;
    stats->empty_overlap = count == 0;
  }
  if (count == 0) return 0.0;
  return reduction == Reduction::kMean ? sum / count : sum;
}

NormalSimilarity normal_similarity_loss(const DepthMap& pred,
                                        const DepthMap& gt,
                                        const Intrinsics& K, double beta,
                                        SimilarityMode mode,
                                        Reduction reduction) {
  require_same_shape(pred, gt);
  K.require_valid();
  const NormalMap pred_raw = estimate_normals(pred, K);
  const NormalMap gt_raw = estimate_normals(gt, K);
  const NormalTermMasks masks = normal_term_masks(pred_raw, gt_raw, mode);

  const int w = pred.width();
  const int h = pred.height();
  double align_sum = 0.0;
  double reg_sum = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      if (masks.align[i]) {
        double dot;
        if (mode == SimilarityMode::kNormalizedAlign)
          dot = (pred_raw.at(x, y) / pred_raw.at(x, y).norm())
                    .dot(gt_raw.at(x, y) / gt_raw.at(x, y).norm());
        else
          dot = pred_raw.at(x, y).dot(gt_raw.at(x, y));
        align_sum += std::abs(1.0 - dot);
      }
      if (masks.reg[i])
        reg_sum += std::abs(1.0 - pred_raw.at(x, y).dot(pred_raw.at(x, y)));
    }
  }

  NormalSimilarity out;
  out.align_count = masks.align_count;
  out.reg_count = masks.reg_count;
  if (reduction == Reduction::kMean) {
    out.align = masks.align_count > 0 ? align_sum / masks.align_count : 0.0;
    out.reg = masks.reg_count > 0 ? reg_sum / masks.reg_count : 0.0;
  } else {
    out.align = align_sum;
    out.reg = reg_sum;
  }
  out.combined = out.align + beta * out.reg;
  return out;
}

LossBreakdown op_loss(const DepthMap& pred, const DepthMap& gt,
                      const Intrinsics& K, const OpLossConfig& cfg) {
  require_same_shape(pred, gt);
  K.require_valid();
  cfg.require_valid();

  LossBreakdown out;
  PointDistanceStats stats;
  out.p2p = point_distance_loss(pred, gt, K, cfg.reduction, &stats);
  out.valid_pixel_count = stats.count;
  out.empty_overlap = stats.empty_overlap;

  double image_sum = 0.0;
  for (int y = 0; y < pred.height(); ++y)
    for (int x = 0; x < pred.width(); ++x)
      if (pred.is_valid(x, y) && gt.is_valid(x, y))
        image_sum += std::abs(pred.at(x, y) - gt.at(x, y));
  if (stats.count > 0)
    out.image_l1 = cfg.reduction == Reduction::kMean ? image_sum / stats.count
                                                     : image_sum;

  if (cfg.alpha2 > 0.0) {
    const NormalSimilarity ns = normal_similarity_loss(
        pred, gt, K, cfg.beta, cfg.similarity_mode, cfg.reduction);
    out.n2n_align = ns.align;
    out.n2n_reg = ns.reg;
    out.valid_normal_count = ns.align_count;
    out.valid_pred_normal_count = ns.reg_count;
  }

  out.op = cfg.alpha1 * out.p2p +
           cfg.alpha2 * (out.n2n_align + cfg.beta * out.n2n_reg);
  out.total = out.image_l1 + cfg.lambda * out.op;
  return out;
}

GradientMap op_loss_gradient(const DepthMap& pred, const DepthMap& gt,
                             const Intrinsics& K, const OpLossConfig& cfg) {
  require_same_shape(pred, gt);
  K.require_valid();
  cfg.require_valid();

  const int w = pred.width();
  const int h = pred.height();
  GradientMap grad(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      grad.set_valid(x, y, pred.is_valid(x, y));

  // image_l1 and p2p act per pixel and share the jointly-valid mask.
  long long depth_count = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (pred.is_valid(x, y) && gt.is_valid(x, y)) ++depth_count;
  const double depth_scale =
      cfg.reduction == Reduction::kMean && depth_count > 0
          ? 1.0 / static_cast<double>(depth_count)
          : 1.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!pred.is_valid(x, y) || !gt.is_valid(x, y)) continue;
      const double s = sgn(pred.at(x, y) - gt.at(x, y));
      if (s == 0.0) continue;
      const double w_l1 = K.ray(x, y).cwiseAbs().sum();
      grad.at(x, y) += s * depth_scale * (1.0 + cfg.lambda * cfg.alpha1 * w_l1);
    }
  }

  // Normal terms couple each depth pixel to the normal sites of its 3x3
  // neighborhood. Walk the sites and scatter chain-rule contributions back
  // through the Sobel taps; site masks guarantee every tap target is a
  // valid predicted pixel.
  if (cfg.lambda * cfg.alpha2 > 0.0) {
    const PointMap points = back_project_map(pred, K);
    const SobelGradients grads = sobel_gradients(points);
    NormalMap pred_raw(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!grads.grad_x.is_valid(x, y)) continue;
        pred_raw.at(x, y) = grads.grad_x.at(x, y).cross(grads.grad_y.at(x, y));
        pred_raw.set_valid(x, y, true);
      }
    }
    const NormalMap gt_raw = estimate_normals(gt, K);
    const NormalTermMasks masks =
        normal_term_masks(pred_raw, gt_raw, cfg.similarity_mode);
    const double align_scale =
        cfg.reduction == Reduction::kMean && masks.align_count > 0
            ? 1.0 / static_cast<double>(masks.align_count)
            : 1.0;
    const double reg_scale =
        cfg.reduction == Reduction::kMean && masks.reg_count > 0
            ? 1.0 / static_cast<double>(masks.reg_count)
            : 1.0;
    const double la = cfg.lambda * cfg.alpha2;

    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const size_t i = static_cast<size_t>(y) * w + x;
        if (!masks.align[i] && !masks.reg[i]) continue;
        const Vec3& hp = pred_raw.at(x, y);
        Vec3 dh = Vec3::Zero();
        if (masks.align[i]) {
          if (cfg.similarity_mode == SimilarityMode::kNormalizedAlign) {
            const double norm = hp.norm();
            const Vec3 np = hp / norm;
            const Vec3 ng = gt_raw.at(x, y) / gt_raw.at(x, y).norm();
            const double dot = np.dot(ng);
            dh += la * align_scale * sgn(1.0 - dot) * (-(ng - np * dot) / norm);
          } else {
            const Vec3& hg = gt_raw.at(x, y);
            dh += la * align_scale * sgn(1.0 - hp.dot(hg)) * (-hg);
          }
        }
        if (masks.reg[i])
          dh += la * cfg.beta * reg_scale * sgn(1.0 - hp.dot(hp)) * (-2.0 * hp);
        if (dh.isZero(0.0)) continue;

        // h = gx x gy, so <dh, d(h)> = <gy x dh, d(gx)> + <dh x gx, d(gy)>.
        const Vec3 d_gx = grads.grad_y.at(x, y).cross(dh);
        const Vec3 d_gy = dh.cross(grads.grad_x.at(x, y));
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int tx = std::clamp(x + dx, 0, w - 1);
            const int ty = std::clamp(y + dy, 0, h - 1);
            const Vec3 coeff = kSobelX[dy + 1][dx + 1] * d_gx +
                               kSobelY[dy + 1][dx + 1] * d_gy;
            grad.at(tx, ty) += coeff.dot(K.ray(tx, ty));
          }
        }
      }
    }
  }
  return grad;
}

}  // namespace opd

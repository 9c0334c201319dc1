#pragma once

#include "opd/camera.hpp"
#include "opd/maps.hpp"

namespace opd {

enum class SimilarityMode {
  // Alignment term on unit normals (cosine), magnitude regularizer on the
  // raw self-dot ||h||^2.
  kNormalizedAlign,
  // Both terms on raw cross-product vectors.
  kRawDot,
};

enum class Reduction { kSum, kMean };

struct OpLossConfig {
  double alpha1 = 1.0;  // weight of the point distance term
  double alpha2 = 1.0;  // weight of the normal similarity term
  double beta = 1.0;    // weight of the normal magnitude regularizer
  double lambda = 0.05; // weight of the OP term inside the total loss
  SimilarityMode similarity_mode = SimilarityMode::kNormalizedAlign;
  Reduction reduction = Reduction::kSum;

  void require_valid() const {
    for (double w : {alpha1, alpha2, beta, lambda})
      if (!std::isfinite(w) || w < 0.0)
        throw std::invalid_argument(
            "OpLossConfig: weights must be finite and >= 0");
  }
};

struct LossBreakdown {
  double p2p = 0.0;
  double n2n_align = 0.0;
  double n2n_reg = 0.0;
  double op = 0.0;
  double image_l1 = 0.0;
  double total = 0.0;
  // Pixels contributing to image_l1/p2p (valid depth in both maps).
  long long valid_pixel_count = 0;
  // Pixels contributing to the align term.
  long long valid_normal_count = 0;
  // Pixels contributing to the reg term (valid predicted normal).
  long long valid_pred_normal_count = 0;
  // Set when no pixel is jointly valid; the affected terms are 0.
  bool empty_overlap = false;
};

struct PointDistanceStats {
  long long count = 0;
  bool empty_overlap = false;
};

// Sum over jointly valid pixels of || bp(pred) - bp(gt) ||_1, which equals
// |pred - gt| * ||K^-1 [x, y, 1]||_1 per pixel. MEAN divides by the count.
// Returns 0 and sets stats->empty_overlap when no pixel is jointly valid.
double point_distance_loss(const DepthMap& pred, const DepthMap& gt,
                           const Intrinsics& K, Reduction reduction,
                           PointDistanceStats* stats = nullptr);

struct NormalSimilarity {
  double align = 0.0;
  double reg = 0.0;
  double combined = 0.0;  // align + beta * reg
  long long align_count = 0;
  long long reg_count = 0;
};

// align = sum |1 - <n_pred, n_gt>| over pixels with valid normals in both
// maps; reg = sum |1 - <h_pred, h_pred>| over pixels with a valid predicted
// normal. In kNormalizedAlign the align term uses unit normals and the reg
// term the raw self-dot; in kRawDot both use raw vectors.
NormalSimilarity normal_similarity_loss(const DepthMap& pred,
                                        const DepthMap& gt,
                                        const Intrinsics& K, double beta,
                                        SimilarityMode mode,
                                        Reduction reduction);

// Full breakdown: op = alpha1 * p2p + alpha2 * (align + beta * reg),
// total = image_l1 + lambda * op. Normal terms are skipped (reported 0)
// when alpha2 == 0.
LossBreakdown op_loss(const DepthMap& pred, const DepthMap& gt,
                      const Intrinsics& K, const OpLossConfig& cfg);

// Analytic d(total)/d(pred depth) per pixel, chaining through
// back-projection, the Sobel stencil, the cross product and the similarity
// terms. L1 subgradients at exact kinks are taken as 0.
GradientMap op_loss_gradient(const DepthMap& pred, const DepthMap& gt,
                             const Intrinsics& K, const OpLossConfig& cfg);

}  // namespace opd

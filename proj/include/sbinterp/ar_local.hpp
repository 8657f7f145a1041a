#pragma once

#include <limits>
#include <vector>

#include "sbinterp/image.hpp"
#include "sbinterp/sampling.hpp"

namespace sbi {

struct Offset {
  int d_row = 0;
  int d_col = 0;

  friend bool operator==(const Offset&, const Offset&) = default;
};

/// Ordered AR tap layout. The order of `offsets` fixes the meaning of each
/// coefficient in ARModel::w.
struct NeighborLayout {
  std::vector<Offset> offsets;

  /// (-1,-1), (-1,1), (1,-1), (1,1)
  static NeighborLayout diagonal4();

  int order() const { return static_cast<int>(offsets.size()); }
  /// Largest |d_row| or |d_col| over all taps.
  int reach() const;
  void validate() const;

  friend bool operator==(const NeighborLayout&, const NeighborLayout&) = default;
};

struct PatchWeightParams {
  int patch_size = 5;
  double mu = 0.008;

  void validate() const;
};

struct ARModel {
  NeighborLayout layout;
  std::vector<double> w;
  /// Attained (weighted) squared prediction error at w, ridge penalty excluded.
  double residual_energy = 0.0;
  /// sigma_max / sigma_min of the design matrix; only set by the
  /// pseudoinverse baseline.
  double condition_number = std::numeric_limits<double>::quiet_NaN();
};

enum class RidgeScale {
  absolute,
  /// ridge * max(trace(A^T Theta A) / n, 1)
  trace_relative,
};

/// Softmin weights theta(k) = exp(-mu d_k) / Z over the layout taps, where d_k
/// is the mean squared difference between the patch at `center` and the patch
/// at center + offset_k. Patches read through symmetric reflection.
std::vector<double> patch_weights(const Image& img, Coord center, const NeighborLayout& layout,
                                  const PatchWeightParams& params);

/// Weighted ridge least squares over a window: each pixel i contributes one
/// equation per tap k, predicting its k-th neighbor from that neighbor's own
/// layout neighbors, weighted by theta(i, k).
///
/// Throws Error naming the window when the damped normal matrix is singular.
ARModel fit_ar_wls(const Image& img, const Rect& window, const NeighborLayout& layout,
                   const PatchWeightParams& params, double ridge,
                   RidgeScale scale = RidgeScale::absolute);

/// sum_j w_j * img(i + offset_j) for every pixel of the window, returned as a
/// window-sized image.
Image predict_ar(const Image& img, const ARModel& model, const Rect& window);

/// Conventional AR fit x_i = sum_j w_j x(i + offset_j) using only pixels whose
/// neighbors all fall inside the window; minimum-norm least squares (A^+ x).
/// Throws when fewer than `order` such equations exist.
ARModel fit_ar_pinv_baseline(const Image& lr_window, const NeighborLayout& layout);

/// Square tiles of side `tile_size` covering an image row-major; edge tiles
/// are truncated. models[t] belongs to tile(t).
struct ArTiling {
  int image_width = 0;
  int image_height = 0;
  int tile_size = 0;
  std::vector<ARModel> models;

  int tiles_across() const { return (image_width + tile_size - 1) / tile_size; }
  int tiles_down() const { return (image_height + tile_size - 1) / tile_size; }
  int tile_count() const { return tiles_across() * tiles_down(); }
  Rect tile(int index) const;
};

ArTiling fit_ar_tiles(const Image& img, int tile_size, const NeighborLayout& layout,
                      const PatchWeightParams& params, double ridge, RidgeScale scale,
                      unsigned threads = 1);

Image predict_ar_tiles(const Image& img, const ArTiling& tiling, unsigned threads = 1);

/// Total weighted AR residual of `img` under the per-tile models.
double local_ar_energy(const Image& img, const ArTiling& tiling, const PatchWeightParams& params,
                       unsigned threads = 1);

struct CgOptions {
  int max_iters = 50;
  /// Stop once ||residual|| <= tolerance * ||rhs||.
  double tolerance = 1e-6;
};

/// AR-regularized estimate of g for fixed per-tile coefficients:
///
///   argmin_g  lambda * sum_{i,k} theta(i,k) |g(i+o_k) - sum_j w_j g(i+o_k+o_j)|^2
///             + alpha * ||g - anchor||^2
///
/// theta is computed on `reference`, and the coefficients of pixel i come from
/// the tile containing i. When `pinned` is given, g is held at `reference` on
/// that grid's retained samples and only the remaining pixels are solved for.
/// Solved by conjugate gradients; lambda == 0 returns the anchor.
Image solve_g_subproblem(const Image& anchor, const Image& reference, const ArTiling& tiling,
                         const PatchWeightParams& params, double lambda, double alpha,
                         const SamplingSpec* pinned = nullptr, const CgOptions& cg = {},
                         unsigned threads = 1);

}  // namespace sbi

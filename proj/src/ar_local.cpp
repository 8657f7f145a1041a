#include "sbinterp/ar_local.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "sbinterp/parallel.hpp"

namespace sbi {

namespace {

// Mirror-padded copy addressed in original image coordinates.
class PaddedView {
 public:
  PaddedView(const Image& img, int margin) : margin_(margin), padded_(pad_mirror(img, margin)) {}

  double at(int row, int col) const { return padded_(row + margin_, col + margin_); }

 private:
  int margin_;
  Image padded_;
};

int view_margin(const NeighborLayout& layout, const PatchWeightParams& params) {
  return 2 * layout.reach() + params.patch_size / 2;
}

double patch_distance(const PaddedView& view, int r0, int c0, int r1, int c1, int half) {
  double acc = 0.0;
  for (int dr = -half; dr <= half; ++dr) {
    for (int dc = -half; dc <= half; ++dc) {
      const double d = view.at(r0 + dr, c0 + dc) - view.at(r1 + dr, c1 + dc);
      acc += d * d;
    }
  }
  const int side = 2 * half + 1;
  return acc / static_cast<double>(side * side);
}

void compute_theta(const PaddedView& view, int row, int col, const NeighborLayout& layout,
                   const PatchWeightParams& params, std::vector<double>& theta) {
  const int half = params.patch_size / 2;
  const std::size_t n = layout.offsets.size();
  theta.resize(n);
  double d_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const Offset& o = layout.offsets[k];
    theta[k] = patch_distance(view, row, col, row + o.d_row, col + o.d_col, half);
    d_min = std::min(d_min, theta[k]);
  }
  // shifting by d_min leaves the normalized weights unchanged and avoids underflow
  double z = 0.0;
  for (auto& t : theta) {
    t = std::exp(-params.mu * (t - d_min));
    z += t;
  }
  for (auto& t : theta) t /= z;
}

void check_window(const Image& img, const Rect& window) {
  if (window.height < 1 || window.width < 1 || window.row < 0 || window.col < 0 ||
      window.row + window.height > img.height() || window.col + window.width > img.width()) {
    throw Error("AR window at (" + std::to_string(window.row) + ", " + std::to_string(window.col) +
                ") size " + std::to_string(window.height) + "x" + std::to_string(window.width) +
                " is empty or outside the image");
  }
}

double window_energy(const PaddedView& view, const ARModel& model, const Rect& window,
                     const PatchWeightParams& params) {
  const auto& layout = model.layout;
  const int n = layout.order();
  std::vector<double> theta;
  double energy = 0.0;
  for (int r = window.row; r < window.row + window.height; ++r) {
    for (int c = window.col; c < window.col + window.width; ++c) {
      compute_theta(view, r, c, layout, params, theta);
      for (int k = 0; k < n; ++k) {
        const int tr = r + layout.offsets[k].d_row;
        const int tc = c + layout.offsets[k].d_col;
        double pred = 0.0;
        for (int j = 0; j < n; ++j) {
          pred += model.w[j] * view.at(tr + layout.offsets[j].d_row, tc + layout.offsets[j].d_col);
        }
        const double e = view.at(tr, tc) - pred;
        energy += theta[k] * e * e;
      }
    }
  }
  return energy;
}

ARModel fit_window(const PaddedView& view, const Rect& window, const NeighborLayout& layout,
                   const PatchWeightParams& params, double ridge, RidgeScale scale) {
  const int n = layout.order();
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd a(n);
  std::vector<double> theta;

  for (int r = window.row; r < window.row + window.height; ++r) {
    for (int c = window.col; c < window.col + window.width; ++c) {
      compute_theta(view, r, c, layout, params, theta);
      for (int k = 0; k < n; ++k) {
        const int tr = r + layout.offsets[k].d_row;
        const int tc = c + layout.offsets[k].d_col;
        for (int j = 0; j < n; ++j) {
          a[j] = view.at(tr + layout.offsets[j].d_row, tc + layout.offsets[j].d_col);
        }
        normal.noalias() += theta[k] * a * a.transpose();
        rhs.noalias() += theta[k] * view.at(tr, tc) * a;
      }
    }
  }

  double damping = ridge;
  if (scale == RidgeScale::trace_relative) damping *= std::max(normal.trace() / n, 1.0);
  normal.diagonal().array() += damping;

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  // LDLT pseudo-inverts zero pivots, so rcond alone does not flag rank loss
  const auto pivots = ldlt.vectorD().cwiseAbs();
  const bool degenerate = !(pivots.minCoeff() > 1e-14 * pivots.maxCoeff());
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || degenerate || !(ldlt.rcond() > 1e-14)) {
    throw Error("AR normal equations are singular for window at (" + std::to_string(window.row) +
                ", " + std::to_string(window.col) + ") size " + std::to_string(window.height) +
                "x" + std::to_string(window.width));
  }
  const Eigen::VectorXd w = ldlt.solve(rhs);

  ARModel model;
  model.layout = layout;
  model.w.assign(w.data(), w.data() + n);

  model.residual_energy = window_energy(view, model, window, params);
  return model;
}

void predict_window(const PaddedView& view, const ARModel& model, const Rect& window, Image& out,
                    int out_row, int out_col) {
  const auto& offsets = model.layout.offsets;
  for (int r = 0; r < window.height; ++r) {
    for (int c = 0; c < window.width; ++c) {
      double pred = 0.0;
      for (std::size_t j = 0; j < offsets.size(); ++j) {
        pred += model.w[j] *
                view.at(window.row + r + offsets[j].d_row, window.col + c + offsets[j].d_col);
      }
      out(out_row + r, out_col + c) = pred;
    }
  }
}

// Weighted AR residual operator over every (pixel i, tap k) equation of a
// tiling, with mirror-reflected pixel indices precomputed.
class ArResidualOperator {
 public:
  ArResidualOperator(const Image& reference, const ArTiling& tiling, const PatchWeightParams& params,
                     unsigned threads)
      : tiling_(tiling), width_(reference.width()), height_(reference.height()) {
    const NeighborLayout& layout = tiling.models.front().layout;
    order_ = layout.order();
    const std::size_t pixels = reference.size();
    const auto n = static_cast<std::size_t>(order_);
    target_.resize(pixels * n);
    taps_.resize(pixels * n * n);
    theta_.resize(pixels * n);
    tile_.resize(pixels);

    const PaddedView view(reference, view_margin(layout, params));
    auto mirror = [&](int r, int c) {
      return reflect_index(r, height_) * width_ + reflect_index(c, width_);
    };
    parallel_for(static_cast<std::size_t>(height_), threads, [&](std::size_t row) {
      const int r = static_cast<int>(row);
      std::vector<double> theta;
      for (int c = 0; c < width_; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * static_cast<std::size_t>(width_) +
                              static_cast<std::size_t>(c);
        tile_[i] = (r / tiling.tile_size) * tiling.tiles_across() + c / tiling.tile_size;
        compute_theta(view, r, c, layout, params, theta);
        for (std::size_t k = 0; k < n; ++k) {
          const int tr = r + layout.offsets[k].d_row;
          const int tc = c + layout.offsets[k].d_col;
          const std::size_t e = i * n + k;
          target_[e] = mirror(tr, tc);
          theta_[e] = theta[k];
          for (std::size_t j = 0; j < n; ++j) {
            taps_[e * n + j] = mirror(tr + layout.offsets[j].d_row, tc + layout.offsets[j].d_col);
          }
        }
      }
    });
  }

  // out = R^T Theta R v
  void apply_normal(const std::vector<double>& v, std::vector<double>& out,
                    std::vector<double>& residual, unsigned threads) const {
    const auto n = static_cast<std::size_t>(order_);
    const std::size_t pixels = tile_.size();
    residual.resize(pixels * n);
    parallel_for(pixels, threads, [&](std::size_t i) {
      const auto& w = tiling_.models[static_cast<std::size_t>(tile_[i])].w;
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t e = i * n + k;
        double res = v[static_cast<std::size_t>(target_[e])];
        for (std::size_t j = 0; j < n; ++j) res -= w[j] * v[static_cast<std::size_t>(taps_[e * n + j])];
        residual[e] = theta_[e] * res;
      }
    });
    // scatter sequentially in equation order
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < pixels; ++i) {
      const auto& w = tiling_.models[static_cast<std::size_t>(tile_[i])].w;
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t e = i * n + k;
        const double res = residual[e];
        out[static_cast<std::size_t>(target_[e])] += res;
        for (std::size_t j = 0; j < n; ++j) out[static_cast<std::size_t>(taps_[e * n + j])] -= w[j] * res;
      }
    }
  }

 private:
  const ArTiling& tiling_;
  int width_;
  int height_;
  int order_ = 0;
  std::vector<int> target_;
  std::vector<int> taps_;
  std::vector<double> theta_;
  std::vector<int> tile_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

NeighborLayout NeighborLayout::diagonal4() { return {{{-1, -1}, {-1, 1}, {1, -1}, {1, 1}}}; }

int NeighborLayout::reach() const {
  int r = 0;
  for (const auto& o : offsets) r = std::max({r, std::abs(o.d_row), std::abs(o.d_col)});
  return r;
}

void NeighborLayout::validate() const {
  if (offsets.empty()) throw Error("AR layout needs at least one tap");
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (offsets[i] == Offset{0, 0}) throw Error("AR layout must not contain the (0,0) offset");
    for (std::size_t j = 0; j < i; ++j) {
      if (offsets[i] == offsets[j]) throw Error("AR layout offsets must be distinct");
    }
  }
}

void PatchWeightParams::validate() const {
  if (patch_size < 3 || patch_size % 2 == 0) throw Error("patch size must be odd and >= 3");
  if (!(mu > 0.0)) throw Error("patch weight decay mu must be positive");
}

Rect ArTiling::tile(int index) const {
  const int tr = index / tiles_across();
  const int tc = index % tiles_across();
  const int row = tr * tile_size;
  const int col = tc * tile_size;
  return {row, col, std::min(tile_size, image_height - row), std::min(tile_size, image_width - col)};
}

std::vector<double> patch_weights(const Image& img, Coord center, const NeighborLayout& layout,
                                  const PatchWeightParams& params) {
  layout.validate();
  params.validate();
  if (center.row < 0 || center.col < 0 || center.row >= img.height() ||
      center.col >= img.width()) {
    throw Error("patch centre outside the image");
  }
  const PaddedView view(img, layout.reach() + params.patch_size / 2);
  std::vector<double> theta;
  compute_theta(view, center.row, center.col, layout, params, theta);
  return theta;
}

ARModel fit_ar_wls(const Image& img, const Rect& window, const NeighborLayout& layout,
                   const PatchWeightParams& params, double ridge, RidgeScale scale) {
  layout.validate();
  params.validate();
  check_window(img, window);
  if (!(ridge >= 0.0)) throw Error("ridge must be non-negative");
  const PaddedView view(img, view_margin(layout, params));
  return fit_window(view, window, layout, params, ridge, scale);
}

Image predict_ar(const Image& img, const ARModel& model, const Rect& window) {
  model.layout.validate();
  check_window(img, window);
  if (model.w.size() != model.layout.offsets.size()) {
    throw Error("AR model coefficient count does not match its layout");
  }
  const PaddedView view(img, model.layout.reach());
  Image out(window.width, window.height);
  predict_window(view, model, window, out, 0, 0);
  return out;
}

ARModel fit_ar_pinv_baseline(const Image& lr_window, const NeighborLayout& layout) {
  layout.validate();
  const int n = layout.order();
  std::vector<Coord> usable;
  for (int r = 0; r < lr_window.height(); ++r) {
    for (int c = 0; c < lr_window.width(); ++c) {
      const bool inside = std::all_of(layout.offsets.begin(), layout.offsets.end(),
                                      [&](const Offset& o) {
                                        const int rr = r + o.d_row;
                                        const int cc = c + o.d_col;
                                        return rr >= 0 && cc >= 0 && rr < lr_window.height() &&
                                               cc < lr_window.width();
                                      });
      if (inside) usable.push_back({r, c});
    }
  }
  if (static_cast<int>(usable.size()) < n) {
    throw Error("AR baseline window has " + std::to_string(usable.size()) +
                " usable equations, needs at least " + std::to_string(n));
  }

  const auto m = static_cast<Eigen::Index>(usable.size());
  Eigen::MatrixXd design(m, n);
  Eigen::VectorXd target(m);
  for (Eigen::Index e = 0; e < m; ++e) {
    const Coord p = usable[static_cast<std::size_t>(e)];
    target[e] = lr_window(p.row, p.col);
    for (int j = 0; j < n; ++j) {
      design(e, j) = lr_window(p.row + layout.offsets[j].d_row, p.col + layout.offsets[j].d_col);
    }
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd w = svd.solve(target);
  const auto& sv = svd.singularValues();

  ARModel model;
  model.layout = layout;
  model.w.assign(w.data(), w.data() + n);
  model.residual_energy = (design * w - target).squaredNorm();
  model.condition_number = sv[n - 1] > 0.0 ? sv[0] / sv[n - 1]
                                           : std::numeric_limits<double>::infinity();
  return model;
}

ArTiling fit_ar_tiles(const Image& img, int tile_size, const NeighborLayout& layout,
                      const PatchWeightParams& params, double ridge, RidgeScale scale,
                      unsigned threads) {
  layout.validate();
  params.validate();
  if (tile_size < 1) throw Error("AR tile size must be positive");
  if (!(ridge >= 0.0)) throw Error("ridge must be non-negative");
  ArTiling tiling{img.width(), img.height(), tile_size, {}};
  tiling.models.resize(static_cast<std::size_t>(tiling.tile_count()));
  const PaddedView view(img, view_margin(layout, params));
  parallel_for(tiling.models.size(), threads, [&](std::size_t t) {
    tiling.models[t] =
        fit_window(view, tiling.tile(static_cast<int>(t)), layout, params, ridge, scale);
  });
  return tiling;
}

Image predict_ar_tiles(const Image& img, const ArTiling& tiling, unsigned threads) {
  if (img.width() != tiling.image_width || img.height() != tiling.image_height) {
    throw Error("AR tiling does not match the image dimensions");
  }
  int reach = 0;
  for (const auto& m : tiling.models) reach = std::max(reach, m.layout.reach());
  const PaddedView view(img, reach);
  Image out(img.width(), img.height());
  parallel_for(tiling.models.size(), threads, [&](std::size_t t) {
    const Rect win = tiling.tile(static_cast<int>(t));
    predict_window(view, tiling.models[t], win, out, win.row, win.col);
  });
  return out;
}

double local_ar_energy(const Image& img, const ArTiling& tiling, const PatchWeightParams& params,
                       unsigned threads) {
  params.validate();
  if (img.width() != tiling.image_width || img.height() != tiling.image_height) {
    throw Error("AR tiling does not match the image dimensions");
  }
  int reach = 0;
  for (const auto& m : tiling.models) reach = std::max(reach, m.layout.reach());
  const PaddedView view(img, 2 * reach + params.patch_size / 2);
  std::vector<double> per_tile(tiling.models.size());
  parallel_for(per_tile.size(), threads, [&](std::size_t t) {
    per_tile[t] = window_energy(view, tiling.models[t], tiling.tile(static_cast<int>(t)), params);
  });
  double total = 0.0;
  for (double e : per_tile) total += e;
  return total;
}

Image solve_g_subproblem(const Image& anchor, const Image& reference, const ArTiling& tiling,
                         const PatchWeightParams& params, double lambda, double alpha,
                         const SamplingSpec* pinned, const CgOptions& cg, unsigned threads) {
  params.validate();
  require_same_shape(anchor, reference, "solve_g_subproblem");
  if (reference.width() != tiling.image_width || reference.height() != tiling.image_height ||
      tiling.models.empty()) {
    throw Error("AR tiling does not match the image dimensions");
  }
  if (!(lambda >= 0.0) || !(alpha > 0.0)) {
    throw Error("solve_g_subproblem needs lambda >= 0 and alpha > 0");
  }
  if (pinned) pinned->validate();

  const std::size_t pixels = anchor.size();
  const int width = anchor.width();
  std::vector<char> is_free(pixels, 1);
  std::vector<double> fixed(pixels, 0.0);
  if (pinned) {
    for (std::size_t i = 0; i < pixels; ++i) {
      const int r = static_cast<int>(i) / width;
      const int c = static_cast<int>(i) % width;
      if (pinned->is_sample(r, c)) {
        is_free[i] = 0;
        fixed[i] = reference.pixels()[i];
      }
    }
  }

  Image g = anchor;
  auto gp = g.pixels();
  if (lambda == 0.0) {
    for (std::size_t i = 0; i < pixels; ++i) {
      if (!is_free[i]) gp[i] = fixed[i];
    }
    return g;
  }

  const ArResidualOperator op(reference, tiling, params, threads);
  std::vector<double> scratch;
  std::vector<double> tmp(pixels);

  // (lambda R^T Theta R + alpha I) restricted to the free pixels
  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    op.apply_normal(v, out, scratch, threads);
    for (std::size_t i = 0; i < pixels; ++i) out[i] = is_free[i] ? lambda * out[i] + alpha * v[i] : 0.0;
  };

  std::vector<double> rhs(pixels);
  op.apply_normal(fixed, tmp, scratch, threads);
  const auto ap = anchor.pixels();
  for (std::size_t i = 0; i < pixels; ++i) rhs[i] = is_free[i] ? alpha * ap[i] - lambda * tmp[i] : 0.0;

  std::vector<double> z(pixels);
  for (std::size_t i = 0; i < pixels; ++i) z[i] = is_free[i] ? ap[i] : 0.0;
  std::vector<double> r(pixels);
  std::vector<double> p(pixels);
  std::vector<double> q(pixels);
  apply(z, q);
  for (std::size_t i = 0; i < pixels; ++i) r[i] = rhs[i] - q[i];
  p = r;
  double rr = dot(r, r);
  const double stop = cg.tolerance * cg.tolerance * dot(rhs, rhs);
  for (int it = 0; it < cg.max_iters && rr > stop; ++it) {
    apply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) break;
    const double step = rr / pq;
    for (std::size_t i = 0; i < pixels; ++i) {
      z[i] += step * p[i];
      r[i] -= step * q[i];
    }
    const double rr_next = dot(r, r);
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < pixels; ++i) p[i] = r[i] + beta * p[i];
  }

  for (std::size_t i = 0; i < pixels; ++i) gp[i] = is_free[i] ? z[i] : fixed[i];
  return g;
}

}  // namespace sbi

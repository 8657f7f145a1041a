#pragma once

#include <vector>

#include "sbinterp/ar_local.hpp"
#include "sbinterp/image.hpp"
#include "sbinterp/nonlocal3d.hpp"
#include "sbinterp/sampling.hpp"

namespace sbi {

struct ArConfig {
  NeighborLayout layout = NeighborLayout::diagonal4();
  /// Flatter softmin than the standalone default.
  PatchWeightParams patch{.patch_size = 5, .mu = 0.002};
  /// Side of the square coefficient-training tiles.
  int window = 7;
  /// Trace-relative ridge; the literal g step divides it by lambda.
  double ridge = 1e-6;
};

enum class GStep {
  /// g minimizes lambda*Phi(g, w) + alpha*||x - g - U||^2 for the fitted w.
  coupled,
  /// g is the plain AR prediction A w of the current x.
  literal,
};

struct SolverConfig {
  double lambda = 0.05;
  double gamma = 0.4;
  double alpha = 0.2;
  double beta = 0.4;
  int max_iters = 10;
  ArConfig ar;
  BlockMatchParams nl;
  SamplingSpec sampling;
  GStep g_step = GStep::coupled;
  CgOptions cg;
  /// Start g and h at zero instead of at the bicubic estimate.
  bool zero_init = false;
  /// Restrict the g and h updates to the missing pixels, leaving the
  /// observed samples at their current value.
  bool pin_samples = true;
  /// Worker threads for the inner stages; 0 picks the hardware count.
  /// Results do not depend on this value.
  unsigned threads = 1;

  void validate() const;
};

struct IterationRecord {
  int t = 0;
  /// ||y - D x||_2
  double data_residual = 0.0;
  /// Weighted local AR energy of x under this iteration's models.
  double phi = 0.0;
  /// Nonlocal l1 energy of x.
  double psi = 0.0;
};

struct SolverState {
  Image x;
  Image g;
  Image h;
  Image u;
  Image v;
  int t = 0;
  std::vector<IterationRecord> history;
};

struct InterpolationResult {
  Image image;
  std::vector<IterationRecord> history;
};

/// Closed-form minimizer of
///   1/2 ||y - D x||^2 + alpha ||x - g - U||^2 + beta ||x - h - V||^2
/// i.e. (D^T D + (alpha + beta) I)^{-1} r with
///   r = D^T y + alpha (g + U) + beta (h + V).
Image solve_x(const Image& y, const Image& g, const Image& h, const Image& u, const Image& v,
              double alpha, double beta, const SamplingSpec& spec);

/// M - (x - z).
Image bregman_update(const Image& m, const Image& x, const Image& z);

/// Initial state: x = bicubic(y), U = V = 0, g = h = x (or 0 with zero_init).
SolverState initial_state(const Image& y, const SolverConfig& cfg);

/// One outer iteration (x, then w/g, then h, then the multipliers).
void iterate_once(const Image& y, const SolverConfig& cfg, SolverState& state);

/// Runs max_iters iterations from initial_state and returns x clamped to [0, 255].
InterpolationResult interpolate(const Image& y, const SolverConfig& cfg);

}  // namespace sbi

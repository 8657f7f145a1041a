#include "sbinterp/solver.hpp"

#include <algorithm>
#include <cmath>

#include "sbinterp/bicubic.hpp"

namespace sbi {

namespace {

// Restores the observed samples of `dst` from `src`.
void copy_samples(const Image& src, Image& dst, const SamplingSpec& spec) {
  for (int r = spec.phase_row; r < dst.height(); r += spec.factor) {
    for (int c = spec.phase_col; c < dst.width(); c += spec.factor) dst(r, c) = src(r, c);
  }
}

Image difference(const Image& a, const Image& b) {
  Image out = a;
  auto po = out.pixels();
  const auto pb = b.pixels();
  for (std::size_t i = 0; i < po.size(); ++i) po[i] -= pb[i];
  return out;
}

double data_residual(const Image& y, const Image& x, const SamplingSpec& spec) {
  const Image dx = downsample(x, spec);
  double acc = 0.0;
  const auto py = y.pixels();
  const auto pd = dx.pixels();
  for (std::size_t i = 0; i < py.size(); ++i) {
    const double d = py[i] - pd[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw Error("alpha and beta must be positive");
  if (!(lambda >= 0.0) || !(gamma >= 0.0)) throw Error("lambda and gamma must be non-negative");
  if (max_iters < 1) throw Error("max_iters must be at least 1");
  if (ar.window < 1) throw Error("AR window must be at least 1");
  if (!(ar.ridge >= 0.0)) throw Error("AR ridge must be non-negative");
  if (cg.max_iters < 0 || !(cg.tolerance >= 0.0)) throw Error("invalid conjugate-gradient options");
  ar.layout.validate();
  ar.patch.validate();
  nl.validate();
  sampling.validate();
}

Image solve_x(const Image& y, const Image& g, const Image& h, const Image& u, const Image& v,
              double alpha, double beta, const SamplingSpec& spec) {
  spec.validate();
  const double penalty = alpha + beta;
  if (!(penalty > 0.0)) throw Error("solve_x: alpha + beta must be positive");
  require_same_shape(g, h, "solve_x");
  require_same_shape(g, u, "solve_x");
  require_same_shape(g, v, "solve_x");
  if (g.width() != y.width() * spec.factor || g.height() != y.height() * spec.factor) {
    throw Error("solve_x: HR iterates do not match the LR image times the sampling factor");
  }

  Image x = adjoint_upsample(y, spec, g.width(), g.height());
  for (int r = 0; r < x.height(); ++r) {
    for (int c = 0; c < x.width(); ++c) {
      const double rhs = x(r, c) + alpha * (g(r, c) + u(r, c)) + beta * (h(r, c) + v(r, c));
      x(r, c) = rhs / (spec.is_sample(r, c) ? 1.0 + penalty : penalty);
    }
  }
  return x;
}

Image bregman_update(const Image& m, const Image& x, const Image& z) {
  require_same_shape(m, x, "bregman_update");
  require_same_shape(m, z, "bregman_update");
  Image out = m;
  auto po = out.pixels();
  const auto px = x.pixels();
  const auto pz = z.pixels();
  for (std::size_t i = 0; i < po.size(); ++i) po[i] -= px[i] - pz[i];
  return out;
}

SolverState initial_state(const Image& y, const SolverConfig& cfg) {
  cfg.validate();
  Image x0 = bicubic_upscale(y, cfg.sampling);
  const Image zero(x0.width(), x0.height());
  Image aux = cfg.zero_init ? zero : x0;
  return SolverState{x0, aux, aux, zero, zero, 0, {}};
}

void iterate_once(const Image& y, const SolverConfig& cfg, SolverState& s) {
  s.x = solve_x(y, s.g, s.h, s.u, s.v, cfg.alpha, cfg.beta, cfg.sampling);

  // w and g: per-tile weighted AR fit on the current x, then the g estimate.
  ArTiling tiling;
  if (cfg.lambda > 0.0) {
    const bool literal = cfg.g_step == GStep::literal;
    const double ridge = literal ? cfg.ar.ridge / cfg.lambda : cfg.ar.ridge;
    tiling = fit_ar_tiles(s.x, cfg.ar.window, cfg.ar.layout, cfg.ar.patch, ridge,
                          RidgeScale::trace_relative, cfg.threads);
    if (literal) {
      s.g = predict_ar_tiles(s.x, tiling, cfg.threads);
    } else {
      s.g = solve_g_subproblem(difference(s.x, s.u), s.x, tiling, cfg.ar.patch, cfg.lambda,
                               cfg.alpha, cfg.pin_samples ? &cfg.sampling : nullptr, cfg.cg,
                               cfg.threads);
    }
  } else {
    // without the AR term the g step only sees the coupling penalty
    s.g = difference(s.x, s.u);
  }

  s.h = solve_h_subproblem(difference(s.x, s.v), cfg.beta, cfg.gamma, cfg.nl, cfg.threads);

  if (cfg.pin_samples) {
    copy_samples(s.x, s.g, cfg.sampling);
    copy_samples(s.x, s.h, cfg.sampling);
  }

  s.u = bregman_update(s.u, s.x, s.g);
  s.v = bregman_update(s.v, s.x, s.h);
  ++s.t;

  IterationRecord rec;
  rec.t = s.t;
  rec.data_residual = data_residual(y, s.x, cfg.sampling);
  rec.phi = cfg.lambda > 0.0 ? local_ar_energy(s.x, tiling, cfg.ar.patch, cfg.threads) : 0.0;
  rec.psi = nonlocal_energy(s.x, cfg.nl, cfg.threads);
  s.history.push_back(rec);
}

InterpolationResult interpolate(const Image& y, const SolverConfig& cfg) {
  SolverState state = initial_state(y, cfg);
  for (int t = 0; t < cfg.max_iters; ++t) iterate_once(y, cfg, state);
  for (double& p : state.x.pixels()) p = std::clamp(p, 0.0, 255.0);
  return {std::move(state.x), std::move(state.history)};
}

}  // namespace sbi

#pragma once

#include "sbinterp/image.hpp"
#include "sbinterp/sampling.hpp"

namespace sbi {

inline constexpr double kKeysDefaultA = -0.5;

/// Keys cubic-convolution kernel.
double keys_kernel(double t, double a = kKeysDefaultA);

/// Separable 4-tap cubic convolution onto the HR grid of `spec`. HR pixel
/// (factor*i + phase_row, factor*j + phase_col) reproduces LR pixel (i, j)
/// exactly; LR borders are extended by symmetric reflection.
Image bicubic_upscale(const Image& lr, const SamplingSpec& spec, double a = kKeysDefaultA);

}  // namespace sbi

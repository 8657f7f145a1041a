#pragma once

#include "sbinterp/image.hpp"

namespace sbi {

/// Upper bound on reported PSNR; identical images (and differences at
/// round-off level) report this instead of +inf.
inline constexpr double kPsnrCapDb = 99.0;

double mse(const Image& a, const Image& b);

/// min(10 log10(peak^2 / mse), kPsnrCapDb); kPsnrCapDb when mse == 0.
double psnr(const Image& a, const Image& b, double peak = 255.0);

}  // namespace sbi

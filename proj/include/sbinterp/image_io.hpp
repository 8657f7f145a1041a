#pragma once

#include <filesystem>

#include "sbinterp/image.hpp"

namespace sbi {

/// Loads a grayscale image. PGM (P2/P5) and PPM (P3/P6) are decoded natively;
/// PNG goes through libpng. Colour inputs are converted to BT.601 luminance.
/// Samples with maxval other than 255 are rescaled to [0, 255].
Image load_image(const std::filesystem::path& path);

/// Writes binary 8-bit PGM (P5, maxval 255); values are clamped to [0, 255]
/// and rounded to nearest.
void save_pgm(const Image& img, const std::filesystem::path& path);

}  // namespace sbi

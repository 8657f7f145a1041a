#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbi {

/// Raised for contract violations anywhere in the library (bad dimensions,
/// out-of-range rectangles, malformed files, unknown config keys).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Coord {
  int row = 0;
  int col = 0;

  friend bool operator==(const Coord&, const Coord&) = default;
};

/// Axis-aligned rectangle in pixel coordinates, top-left inclusive.
struct Rect {
  int row = 0;
  int col = 0;
  int height = 0;
  int width = 0;

  int area() const { return height * width; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Dense single-channel image of real intensities stored row-major.
///
/// Nominal range is [0, 255] but nothing here clamps; the solver works on
/// fractional values and quantization is left to file output. Dimensions are
/// at least 1x1 and every constructor that accepts external data rejects
/// non-finite values.
class Image {
 public:
  Image(int width, int height, double fill = 0.0);
  Image(int width, int height, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  double operator()(int row, int col) const { return data_[index(row, col)]; }
  double& operator()(int row, int col) { return data_[index(row, col)]; }

  std::span<const double> pixels() const { return data_; }
  std::span<double> pixels() { return data_; }

  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }
  bool all_finite() const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_;
  int height_;
  std::vector<double> data_;
};

/// Symmetric reflection of an index into [0, n) without repeating the edge
/// sample (..., 2, 1, | 0, 1, 2, ..., n-1, | n-2, ...). Periodic with period
/// 2(n-1), so it is defined for any integer offset; n == 1 maps to 0.
int reflect_index(int i, int n);

/// Pads by `margin` pixels on every side using reflect_index.
/// Throws when margin >= min(width, height).
Image pad_reflect(const Image& img, int margin);

/// Pads without the margin < min(width, height) restriction; repeated
/// reflection is used for margins larger than the image.
Image pad_mirror(const Image& img, int margin);

/// Returns the w x h sub-image with top-left corner (x0, y0), x along columns.
Image crop(const Image& img, int x0, int y0, int w, int h);

/// Error-checked binary helpers used across modules.
void require_same_shape(const Image& a, const Image& b, const char* what);

}  // namespace sbi

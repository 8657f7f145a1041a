#include "sbinterp/image.hpp"

#include <algorithm>
#include <cmath>

namespace sbi {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error("image dimensions must be at least 1x1, got " + std::to_string(width) + "x" +
                std::to_string(height));
  }
}

}  // namespace

Image::Image(int width, int height, double fill) : width_(width), height_(height) {
  check_dims(width, height);
  if (!std::isfinite(fill)) throw Error("image fill value must be finite");
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Image::Image(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error("image data length " + std::to_string(data_.size()) + " does not match " +
                std::to_string(width) + "x" + std::to_string(height));
  }
  if (!all_finite()) throw Error("image data contains non-finite values");
}

bool Image::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

int reflect_index(int i, int n) {
  if (n <= 1) return 0;
  const int period = 2 * (n - 1);
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - m;
}

Image pad_mirror(const Image& img, int margin) {
  if (margin < 0) throw Error("padding margin must be non-negative");
  if (margin == 0) return img;
  const int w = img.width() + 2 * margin;
  const int h = img.height() + 2 * margin;
  Image out(w, h);
  for (int r = 0; r < h; ++r) {
    const int sr = reflect_index(r - margin, img.height());
    for (int c = 0; c < w; ++c) {
      out(r, c) = img(sr, reflect_index(c - margin, img.width()));
    }
  }
  return out;
}

Image pad_reflect(const Image& img, int margin) {
  if (margin < 0) throw Error("padding margin must be non-negative");
  if (margin >= std::min(img.width(), img.height())) {
    throw Error("reflection margin " + std::to_string(margin) +
                " must be smaller than the image's smaller dimension");
  }
  return pad_mirror(img, margin);
}

Image crop(const Image& img, int x0, int y0, int w, int h) {
  if (w < 1 || h < 1 || x0 < 0 || y0 < 0 || x0 + w > img.width() || y0 + h > img.height()) {
    throw Error("crop rectangle (" + std::to_string(x0) + ", " + std::to_string(y0) + ", " +
                std::to_string(w) + ", " + std::to_string(h) + ") outside " +
                std::to_string(img.width()) + "x" + std::to_string(img.height()) + " image");
  }
  Image out(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) out(r, c) = img(y0 + r, x0 + c);
  }
  return out;
}

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) {
    throw Error(std::string(what) + ": dimension mismatch " + std::to_string(a.width()) + "x" +
                std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                std::to_string(b.height()));
  }
}

}  // namespace sbi

#include "sbinterp/bicubic.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace sbi {

double keys_kernel(double t, double a) {
  const double x = std::abs(t);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

namespace {

struct Taps {
  std::array<int, 4> index;
  std::array<double, 4> weight;
};

// One entry per HR coordinate along an axis of LR length `n`.
std::vector<Taps> axis_taps(int n, int factor, int phase, double a) {
  std::vector<Taps> taps(static_cast<std::size_t>(n) * static_cast<std::size_t>(factor));
  for (std::size_t x = 0; x < taps.size(); ++x) {
    const int offset = static_cast<int>(x) - phase;
    // floor division keeps the fractional part in [0, 1)
    int base = offset >= 0 ? offset / factor : -((-offset + factor - 1) / factor);
    const double frac = static_cast<double>(offset - base * factor) / factor;
    Taps& t = taps[x];
    for (int k = 0; k < 4; ++k) {
      t.index[k] = reflect_index(base - 1 + k, n);
      t.weight[k] = keys_kernel(frac - static_cast<double>(k - 1), a);
    }
  }
  return taps;
}

}  // namespace

Image bicubic_upscale(const Image& lr, const SamplingSpec& spec, double a) {
  spec.validate();
  const int hw = lr.width() * spec.factor;
  const int hh = lr.height() * spec.factor;
  const auto col_taps = axis_taps(lr.width(), spec.factor, spec.phase_col, a);
  const auto row_taps = axis_taps(lr.height(), spec.factor, spec.phase_row, a);

  Image horiz(hw, lr.height());
  for (int i = 0; i < lr.height(); ++i) {
    for (int x = 0; x < hw; ++x) {
      const Taps& t = col_taps[static_cast<std::size_t>(x)];
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += t.weight[k] * lr(i, t.index[k]);
      horiz(i, x) = acc;
    }
  }

  Image hr(hw, hh);
  for (int y = 0; y < hh; ++y) {
    const Taps& t = row_taps[static_cast<std::size_t>(y)];
    for (int x = 0; x < hw; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += t.weight[k] * horiz(t.index[k], x);
      hr(y, x) = acc;
    }
  }
  return hr;
}

}  // namespace sbi

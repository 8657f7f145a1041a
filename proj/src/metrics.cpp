#include "sbinterp/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace sbi {

double mse(const Image& a, const Image& b) {
  require_same_shape(a, b, "mse");
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  double acc = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = pa[i] - pb[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pa.size());
}

double psnr(const Image& a, const Image& b, double peak) {
  const double err = mse(a, b);
  if (err == 0.0) return kPsnrCapDb;
  return std::min(10.0 * std::log10(peak * peak / err), kPsnrCapDb);
}

}  // namespace sbi

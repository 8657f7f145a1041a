#include "sbinterp/sampling.hpp"

#include <string>

namespace sbi {

namespace {

void check_divisible(const SamplingSpec& spec, int hr_width, int hr_height) {
  if (hr_width % spec.factor != 0 || hr_height % spec.factor != 0) {
    throw Error("HR dimensions " + std::to_string(hr_width) + "x" + std::to_string(hr_height) +
                " are not divisible by factor " + std::to_string(spec.factor));
  }
}

}  // namespace

void SamplingSpec::validate() const {
  if (factor < 2) throw Error("sampling factor must be at least 2");
  if (phase_row < 0 || phase_row >= factor || phase_col < 0 || phase_col >= factor) {
    throw Error("sampling phase must lie in [0, factor)");
  }
}

Image downsample(const Image& hr, const SamplingSpec& spec) {
  spec.validate();
  check_divisible(spec, hr.width(), hr.height());
  Image lr(hr.width() / spec.factor, hr.height() / spec.factor);
  for (int i = 0; i < lr.height(); ++i) {
    for (int j = 0; j < lr.width(); ++j) {
      lr(i, j) = hr(spec.factor * i + spec.phase_row, spec.factor * j + spec.phase_col);
    }
  }
  return lr;
}

Image adjoint_upsample(const Image& lr, const SamplingSpec& spec, int hr_width, int hr_height) {
  spec.validate();
  if (hr_width != lr.width() * spec.factor || hr_height != lr.height() * spec.factor) {
    throw Error("adjoint_upsample: HR dimensions " + std::to_string(hr_width) + "x" +
                std::to_string(hr_height) + " do not equal LR dimensions times factor");
  }
  Image hr(hr_width, hr_height);
  for (int i = 0; i < lr.height(); ++i) {
    for (int j = 0; j < lr.width(); ++j) {
      hr(spec.factor * i + spec.phase_row, spec.factor * j + spec.phase_col) = lr(i, j);
    }
  }
  return hr;
}

Image sample_mask(const SamplingSpec& spec, int hr_width, int hr_height) {
  spec.validate();
  check_divisible(spec, hr_width, hr_height);
  Image mask(hr_width, hr_height);
  for (int r = spec.phase_row; r < hr_height; r += spec.factor) {
    for (int c = spec.phase_col; c < hr_width; c += spec.factor) mask(r, c) = 1.0;
  }
  return mask;
}

}  // namespace sbi

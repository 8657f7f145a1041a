#pragma once

#include "sbinterp/image.hpp"

namespace sbi {

/// Decimation operator D: keeps pixel (factor*i + phase_row, factor*j + phase_col).
/// No anti-alias pre-filter, so D^T D is diagonal.
struct SamplingSpec {
  int factor = 2;
  int phase_row = 0;
  int phase_col = 0;

  void validate() const;
  bool is_sample(int row, int col) const {
    return row % factor == phase_row && col % factor == phase_col;
  }
};

Image downsample(const Image& hr, const SamplingSpec& spec);

/// D^T: scatters LR values onto the retained HR coordinates, zeros elsewhere.
Image adjoint_upsample(const Image& lr, const SamplingSpec& spec, int hr_width, int hr_height);

/// Diagonal of D^T D as an image (1 at retained coordinates, 0 elsewhere).
Image sample_mask(const SamplingSpec& spec, int hr_width, int hr_height);

}  // namespace sbi

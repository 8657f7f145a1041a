#include "sbinterp/nonlocal3d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "sbinterp/parallel.hpp"

namespace sbi {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

void check_dwt_size(int size, int levels) {
  if (size < 1 || levels < 0 || (levels > 0 && (size % (1 << levels)) != 0)) {
    throw Error("DWT block size " + std::to_string(size) + " is not divisible by 2^" +
                std::to_string(levels));
  }
}

// One Haar analysis step on the top-left extent x extent square of a
// stride-`size` buffer. scratch holds at least `extent` values.
void haar_forward_level(double* buf, int size, int extent, double* scratch) {
  const int half = extent / 2;
  for (int r = 0; r < extent; ++r) {
    double* row = buf + r * size;
    for (int k = 0; k < half; ++k) {
      scratch[k] = (row[2 * k] + row[2 * k + 1]) * kInvSqrt2;
      scratch[half + k] = (row[2 * k] - row[2 * k + 1]) * kInvSqrt2;
    }
    std::copy(scratch, scratch + extent, row);
  }
  for (int c = 0; c < extent; ++c) {
    for (int k = 0; k < half; ++k) {
      const double a = buf[(2 * k) * size + c];
      const double b = buf[(2 * k + 1) * size + c];
      scratch[k] = (a + b) * kInvSqrt2;
      scratch[half + k] = (a - b) * kInvSqrt2;
    }
    for (int r = 0; r < extent; ++r) buf[r * size + c] = scratch[r];
  }
}

void haar_inverse_level(double* buf, int size, int extent, double* scratch) {
  const int half = extent / 2;
  for (int c = 0; c < extent; ++c) {
    for (int k = 0; k < half; ++k) {
      const double lo = buf[k * size + c];
      const double hi = buf[(half + k) * size + c];
      scratch[2 * k] = (lo + hi) * kInvSqrt2;
      scratch[2 * k + 1] = (lo - hi) * kInvSqrt2;
    }
    for (int r = 0; r < extent; ++r) buf[r * size + c] = scratch[r];
  }
  for (int r = 0; r < extent; ++r) {
    double* row = buf + r * size;
    for (int k = 0; k < half; ++k) {
      scratch[2 * k] = (row[k] + row[half + k]) * kInvSqrt2;
      scratch[2 * k + 1] = (row[k] - row[half + k]) * kInvSqrt2;
    }
    std::copy(scratch, scratch + extent, row);
  }
}

void dwt2_forward_inplace(double* buf, int size, int levels, double* scratch) {
  for (int l = 0, extent = size; l < levels; ++l, extent /= 2) {
    haar_forward_level(buf, size, extent, scratch);
  }
}

void dwt2_inverse_inplace(double* buf, int size, int levels, double* scratch) {
  for (int l = levels - 1; l >= 0; --l) haar_inverse_level(buf, size, size >> l, scratch);
}

// Row-major n x n orthonormal DCT-II matrix: C[k*n + i].
std::vector<double> dct_matrix(int n) {
  std::vector<double> m(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
    for (int i = 0; i < n; ++i) {
      m[static_cast<std::size_t>(k * n + i)] =
          scale * std::cos(std::numbers::pi * (2.0 * i + 1.0) * k / (2.0 * n));
    }
  }
  return m;
}

// DCT matrices for every group length up to max_group.
class DctBank {
 public:
  explicit DctBank(int max_group) {
    for (int n = 1; n <= max_group; ++n) mats_.push_back(dct_matrix(n));
  }
  const std::vector<double>& get(int n) const { return mats_[static_cast<std::size_t>(n - 1)]; }

 private:
  std::vector<std::vector<double>> mats_;
};

// Applies the (transposed when `inverse`) DCT matrix along the group axis.
void dct_along_groups(double* data, int group, int bb, const std::vector<double>& mat,
                      bool inverse, double* scratch) {
  for (int p = 0; p < bb; ++p) {
    for (int k = 0; k < group; ++k) {
      double acc = 0.0;
      for (int i = 0; i < group; ++i) {
        const double m = inverse ? mat[static_cast<std::size_t>(i * group + k)]
                                 : mat[static_cast<std::size_t>(k * group + i)];
        acc += m * data[i * bb + p];
      }
      scratch[k] = acc;
    }
    for (int k = 0; k < group; ++k) data[k * bb + p] = scratch[k];
  }
}

void forward3d_inplace(std::vector<double>& data, int group, int block, int levels,
                       const std::vector<double>& mat, std::vector<double>& scratch) {
  const int bb = block * block;
  scratch.resize(static_cast<std::size_t>(std::max(block, group)));
  for (int k = 0; k < group; ++k) dwt2_forward_inplace(data.data() + k * bb, block, levels, scratch.data());
  if (group > 1) dct_along_groups(data.data(), group, bb, mat, false, scratch.data());
}

void inverse3d_inplace(std::vector<double>& data, int group, int block, int levels,
                       const std::vector<double>& mat, std::vector<double>& scratch) {
  const int bb = block * block;
  scratch.resize(static_cast<std::size_t>(std::max(block, group)));
  if (group > 1) dct_along_groups(data.data(), group, bb, mat, true, scratch.data());
  for (int k = 0; k < group; ++k) dwt2_inverse_inplace(data.data() + k * bb, block, levels, scratch.data());
}

double block_distance(const Image& img, Coord a, Coord b, int size) {
  double acc = 0.0;
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const double d = img(a.row + r, a.col + c) - img(b.row + r, b.col + c);
      acc += d * d;
    }
  }
  return acc / static_cast<double>(size * size);
}

std::vector<int> axis_positions(int extent, int block, int stride) {
  std::vector<int> pos;
  if (extent < block) return pos;
  for (int p = 0; p + block <= extent; p += stride) pos.push_back(p);
  if (pos.back() != extent - block) pos.push_back(extent - block);
  return pos;
}

}  // namespace

void BlockMatchParams::validate() const {
  if (block_size < 2 || !is_power_of_two(block_size)) {
    throw Error("block size must be a power of two >= 2");
  }
  if (dwt_levels < 0 || (block_size % (1 << dwt_levels)) != 0) {
    throw Error("block size must be divisible by 2^dwt_levels");
  }
  if (search_radius < 0) throw Error("search radius must be non-negative");
  if (max_group < 1) throw Error("max group size must be at least 1");
  if (!(epsilon >= 0.0)) throw Error("block matching threshold must be non-negative");
  if (stride < 1) throw Error("reference stride must be at least 1");
}

BlockStack match_blocks(const Image& img, Coord ref_pos, const BlockMatchParams& params) {
  params.validate();
  const int b = params.block_size;
  if (ref_pos.row < 0 || ref_pos.col < 0 || ref_pos.row + b > img.height() ||
      ref_pos.col + b > img.width()) {
    throw Error("reference block at (" + std::to_string(ref_pos.row) + ", " +
                std::to_string(ref_pos.col) + ") is not inside the image");
  }

  struct Candidate {
    Coord pos;
    double dist;
  };
  std::vector<Candidate> kept;
  const int r0 = std::max(0, ref_pos.row - params.search_radius);
  const int r1 = std::min(img.height() - b, ref_pos.row + params.search_radius);
  const int c0 = std::max(0, ref_pos.col - params.search_radius);
  const int c1 = std::min(img.width() - b, ref_pos.col + params.search_radius);
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const Coord pos{r, c};
      if (pos == ref_pos) continue;
      const double d = block_distance(img, ref_pos, pos, b);
      if (d <= params.epsilon) kept.push_back({pos, d});
    }
  }
  // candidates were generated in raster order, so a stable sort keeps it as the tie-break
  std::stable_sort(kept.begin(), kept.end(),
                   [](const Candidate& x, const Candidate& y) { return x.dist < y.dist; });
  if (static_cast<int>(kept.size()) > params.max_group - 1) {
    kept.resize(static_cast<std::size_t>(params.max_group - 1));
  }

  BlockStack stack;
  stack.ref_pos = ref_pos;
  stack.block_size = b;
  stack.member_pos.push_back(ref_pos);
  stack.distances.push_back(0.0);
  for (const auto& k : kept) {
    stack.member_pos.push_back(k.pos);
    stack.distances.push_back(k.dist);
  }
  stack.data.resize(stack.member_pos.size() * static_cast<std::size_t>(b * b));
  double* out = stack.data.data();
  for (const Coord p : stack.member_pos) {
    for (int r = 0; r < b; ++r) {
      for (int c = 0; c < b; ++c) *out++ = img(p.row + r, p.col + c);
    }
  }
  return stack;
}

std::vector<double> dwt2_forward(std::span<const double> block, int size, int levels) {
  check_dwt_size(size, levels);
  if (block.size() != static_cast<std::size_t>(size * size)) throw Error("DWT input is not size x size");
  std::vector<double> out(block.begin(), block.end());
  std::vector<double> scratch(static_cast<std::size_t>(size));
  dwt2_forward_inplace(out.data(), size, levels, scratch.data());
  return out;
}

std::vector<double> dwt2_inverse(std::span<const double> coeffs, int size, int levels) {
  check_dwt_size(size, levels);
  if (coeffs.size() != static_cast<std::size_t>(size * size)) throw Error("DWT input is not size x size");
  std::vector<double> out(coeffs.begin(), coeffs.end());
  std::vector<double> scratch(static_cast<std::size_t>(size));
  dwt2_inverse_inplace(out.data(), size, levels, scratch.data());
  return out;
}

std::vector<double> dct1_forward(std::span<const double> v) {
  if (v.empty()) throw Error("DCT input must not be empty");
  const int n = static_cast<int>(v.size());
  const auto mat = dct_matrix(n);
  std::vector<double> out(v.size());
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += mat[static_cast<std::size_t>(k * n + i)] * v[i];
    out[k] = acc;
  }
  return out;
}

std::vector<double> dct1_inverse(std::span<const double> coeffs) {
  if (coeffs.empty()) throw Error("DCT input must not be empty");
  const int n = static_cast<int>(coeffs.size());
  const auto mat = dct_matrix(n);
  std::vector<double> out(coeffs.size());
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += mat[static_cast<std::size_t>(k * n + i)] * coeffs[k];
    out[i] = acc;
  }
  return out;
}

std::vector<double> transform3d_forward(const BlockStack& stack, int levels) {
  const int group = stack.group_size();
  const int b = stack.block_size;
  check_dwt_size(b, levels);
  if (group < 1 || stack.data.size() != static_cast<std::size_t>(group * b * b)) {
    throw Error("block stack data does not match its member count");
  }
  std::vector<double> data = stack.data;
  std::vector<double> scratch;
  forward3d_inplace(data, group, b, levels, dct_matrix(group), scratch);
  return data;
}

std::vector<double> transform3d_inverse(std::span<const double> coeffs, int group_size,
                                        int block_size, int levels) {
  check_dwt_size(block_size, levels);
  if (group_size < 1 || coeffs.size() != static_cast<std::size_t>(group_size * block_size * block_size)) {
    throw Error("3-D coefficient array does not match group and block size");
  }
  std::vector<double> data(coeffs.begin(), coeffs.end());
  std::vector<double> scratch;
  inverse3d_inplace(data, group_size, block_size, levels, dct_matrix(group_size), scratch);
  return data;
}

double soft_threshold(double v, double tau) {
  const double mag = std::abs(v) - tau;
  return mag > 0.0 ? std::copysign(mag, v) : 0.0;
}

std::vector<double> soft_threshold(std::span<const double> coeffs, double tau, DcPolicy dc) {
  if (!(tau >= 0.0)) throw Error("shrinkage threshold must be non-negative");
  std::vector<double> out(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) out[i] = soft_threshold(coeffs[i], tau);
  if (dc == DcPolicy::exempt && !coeffs.empty()) out[0] = coeffs[0];
  return out;
}

std::vector<Coord> reference_positions(int width, int height, const BlockMatchParams& params) {
  params.validate();
  const auto rows = axis_positions(height, params.block_size, params.stride);
  const auto cols = axis_positions(width, params.block_size, params.stride);
  std::vector<Coord> refs;
  refs.reserve(rows.size() * cols.size());
  for (int r : rows) {
    for (int c : cols) refs.push_back({r, c});
  }
  return refs;
}

double nonlocal_energy(const Image& img, const BlockMatchParams& params, unsigned threads) {
  const auto refs = reference_positions(img.width(), img.height(), params);
  const DctBank bank(params.max_group);
  std::vector<double> per_ref(refs.size());
  parallel_for(refs.size(), threads, [&](std::size_t q) {
    BlockStack stack = match_blocks(img, refs[q], params);
    std::vector<double> scratch;
    forward3d_inplace(stack.data, stack.group_size(), stack.block_size, params.dwt_levels,
                      bank.get(stack.group_size()), scratch);
    double l1 = 0.0;
    for (double v : stack.data) l1 += std::abs(v);
    per_ref[q] = l1;
  });
  return std::accumulate(per_ref.begin(), per_ref.end(), 0.0);
}

Image solve_h_subproblem(const Image& c, double beta, double gamma,
                         const BlockMatchParams& params, unsigned threads) {
  params.validate();
  if (!(beta > 0.0)) throw Error("beta must be positive");
  if (!(gamma >= 0.0)) throw Error("gamma must be non-negative");
  const double tau = gamma / (2.0 * beta);
  if (tau == 0.0) return c;

  const auto refs = reference_positions(c.width(), c.height(), params);
  const DctBank bank(params.max_group);
  const int b = params.block_size;
  const int lowpass_extent = b >> params.dwt_levels;
  const auto plane = static_cast<std::size_t>(b * b);

  std::vector<double> sum(c.size(), 0.0);
  std::vector<double> weight(c.size(), 0.0);

  // Groups are filtered in parallel one chunk at a time and then scattered in
  // reference order, so accumulation order never depends on the thread count.
  constexpr std::size_t kChunk = 256;
  std::vector<BlockStack> filtered;
  for (std::size_t first = 0; first < refs.size(); first += kChunk) {
    const std::size_t count = std::min(kChunk, refs.size() - first);
    filtered.assign(count, BlockStack{});
    parallel_for(count, threads, [&](std::size_t i) {
      BlockStack stack = match_blocks(c, refs[first + i], params);
      const int group = stack.group_size();
      const auto& mat = bank.get(group);
      std::vector<double> scratch;
      forward3d_inplace(stack.data, group, b, params.dwt_levels, mat, scratch);
      // the coarsest low-low band of the group-mean plane is left untouched
      for (std::size_t k = 0; k < stack.data.size(); ++k) {
        const bool lowpass = k < plane && static_cast<int>(k) / b < lowpass_extent &&
                             static_cast<int>(k) % b < lowpass_extent;
        if (!lowpass) stack.data[k] = soft_threshold(stack.data[k], tau);
      }
      inverse3d_inplace(stack.data, group, b, params.dwt_levels, mat, scratch);
      filtered[i] = std::move(stack);
    });
    for (const auto& stack : filtered) {
      const double* src = stack.data.data();
      for (const Coord p : stack.member_pos) {
        for (int r = 0; r < b; ++r) {
          const std::size_t row = static_cast<std::size_t>(p.row + r) * static_cast<std::size_t>(c.width());
          for (int col = 0; col < b; ++col) {
            const std::size_t idx = row + static_cast<std::size_t>(p.col + col);
            sum[idx] += *src++;
            weight[idx] += 1.0;
          }
        }
      }
    }
  }

  Image out = c;
  auto px = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (weight[i] > 0.0) px[i] = sum[i] / weight[i];
  }
  return out;
}

}  // namespace sbi

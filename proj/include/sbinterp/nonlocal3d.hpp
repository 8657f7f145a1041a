#pragma once

#include <span>
#include <vector>

#include "sbinterp/image.hpp"

namespace sbi {

/// Block-matching and collaborative-shrinkage parameters. epsilon is a
/// threshold on the mean squared difference between blocks.
struct BlockMatchParams {
  int block_size = 8;
  int dwt_levels = 2;
  int search_radius = 10;
  int max_group = 16;
  double epsilon = 400.0;
  int stride = 4;

  void validate() const;
};

/// A matched group of blocks. Positions are block top-left corners; block k
/// occupies data[k*B*B, (k+1)*B*B) in row-major order.
struct BlockStack {
  Coord ref_pos;
  std::vector<Coord> member_pos;
  std::vector<double> distances;
  int block_size = 0;
  std::vector<double> data;

  int group_size() const { return static_cast<int>(member_pos.size()); }
  std::span<const double> block(int k) const {
    const auto bb = static_cast<std::size_t>(block_size * block_size);
    return std::span<const double>(data).subspan(static_cast<std::size_t>(k) * bb, bb);
  }
};

/// Exhaustive search over blocks fully inside the image whose top-left lies
/// within search_radius (Chebyshev) of ref_pos. Candidates with distance
/// <= epsilon are kept, ordered by distance with raster order breaking ties,
/// and truncated to max_group. The reference is always member 0.
BlockStack match_blocks(const Image& img, Coord ref_pos, const BlockMatchParams& params);

/// Orthonormal 2-D Haar analysis of a size x size block, `levels` times on
/// the low-low band (Mallat layout: low half first on each axis).
std::vector<double> dwt2_forward(std::span<const double> block, int size, int levels);
std::vector<double> dwt2_inverse(std::span<const double> coeffs, int size, int levels);

/// Orthonormal DCT-II and its inverse (DCT-III).
std::vector<double> dct1_forward(std::span<const double> v);
std::vector<double> dct1_inverse(std::span<const double> coeffs);

/// 2-D DWT on every block followed by a DCT along the group axis at each
/// coefficient position. Layout matches BlockStack::data; index 0 is DC.
std::vector<double> transform3d_forward(const BlockStack& stack, int levels);
std::vector<double> transform3d_inverse(std::span<const double> coeffs, int group_size,
                                        int block_size, int levels);

double soft_threshold(double v, double tau);

enum class DcPolicy { exempt, shrink };

/// Elementwise shrinkage; with DcPolicy::exempt element 0 passes unchanged.
std::vector<double> soft_threshold(std::span<const double> coeffs, double tau,
                                   DcPolicy dc = DcPolicy::exempt);

/// Top-left corners 0, stride, 2*stride, ... along each axis, plus the last
/// valid corner so the whole image is covered. Empty when the image is
/// smaller than a block.
std::vector<Coord> reference_positions(int width, int height, const BlockMatchParams& params);

/// Sum over reference positions of the l1 norm of each group's 3-D transform.
double nonlocal_energy(const Image& img, const BlockMatchParams& params, unsigned threads = 1);

/// Approximate prox of the nonlocal l1 term: group, transform, shrink with
/// tau = gamma / (2 beta), invert, and average overlapping estimates per
/// pixel. Pixels covered by no block keep the value of `c`. The all-lowpass
/// band (the coarsest low-low Haar band at DCT index 0) is not shrunk, which
/// makes constant images fixed points for any number of DWT levels.
Image solve_h_subproblem(const Image& c, double beta, double gamma,
                         const BlockMatchParams& params, unsigned threads = 1);

}  // namespace sbi

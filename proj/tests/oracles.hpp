#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Nothing in here calls into the library's numerical kernels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sbinterp/image.hpp"
#include "sbinterp/sampling.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;
using Vector = std::vector<double>;

inline sbi::Image random_image(int w, int h, std::mt19937_64& rng, double lo = 0.0,
                               double hi = 255.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> px(static_cast<std::size_t>(w) * h);
  for (double& p : px) p = dist(rng);
  return sbi::Image(w, h, std::move(px));
}

inline sbi::Image ramp_image(int w, int h, double a, double b, double c) {
  sbi::Image img(w, h);
  for (int r = 0; r < h; ++r) {
    for (int col = 0; col < w; ++col) img(r, col) = a + b * r + c * col;
  }
  return img;
}

inline double max_abs_diff(const sbi::Image& a, const sbi::Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.pixels()[i] - b.pixels()[i]));
  return m;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double norm2(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Mirror by repeated bouncing off both edges.
inline int bounce(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

inline double at_mirror(const sbi::Image& img, int r, int c) {
  return img(bounce(r, img.height()), bounce(c, img.width()));
}

// Explicit decimation matrix: one row per LR pixel, one column per HR pixel.
inline Matrix decimation_matrix(const sbi::SamplingSpec& spec, int hr_w, int hr_h) {
  const int lr_w = hr_w / spec.factor;
  const int lr_h = hr_h / spec.factor;
  Matrix d(static_cast<std::size_t>(lr_w * lr_h), Vector(static_cast<std::size_t>(hr_w * hr_h), 0.0));
  for (int i = 0; i < lr_h; ++i) {
    for (int j = 0; j < lr_w; ++j) {
      const int hr = (spec.factor * i + spec.phase_row) * hr_w + spec.factor * j + spec.phase_col;
      d[static_cast<std::size_t>(i * lr_w + j)][static_cast<std::size_t>(hr)] = 1.0;
    }
  }
  return d;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.empty() ? 0 : a[0].size(), Vector(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  }
  return t;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  Matrix c(a.size(), Vector(b.empty() ? 0 : b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (a[i][k] == 0.0) continue;
      for (std::size_t j = 0; j < b[k].size(); ++j) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

inline Vector multiply(const Matrix& a, const Vector& x) {
  Vector y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  }
  return y;
}

// Gaussian elimination with partial pivoting.
inline Vector solve_dense(Matrix a, Vector b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (a[piv][col] == 0.0) throw std::runtime_error("oracle: singular system");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

// Cyclic Jacobi eigendecomposition of a symmetric matrix.
// Returns eigenvalues and eigenvectors as columns of the second matrix.
inline std::pair<Vector, Matrix> jacobi_eigen(Matrix a) {
  const std::size_t n = a.size();
  Matrix v(n, Vector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  Vector eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a[i][i];
  return {eig, v};
}

// Minimum-norm least squares via the eigendecomposition of A^T A.
inline Vector pinv_solve(const Matrix& a, const Vector& b) {
  const Matrix at = transpose(a);
  const auto [eig, vecs] = jacobi_eigen(multiply(at, a));
  const Vector atb = multiply(at, b);
  const double top = *std::max_element(eig.begin(), eig.end());
  const std::size_t n = eig.size();
  Vector w(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (eig[k] <= top * 1e-12) continue;
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += vecs[i][k] * atb[i];
    for (std::size_t i = 0; i < n; ++i) w[i] += vecs[i][k] * proj / eig[k];
  }
  return w;
}

// argmin_u tau |u| + (u - v)^2 / 2 by dense grid search, then bisection on
// the sign of the one-sided derivative around the best grid point.
inline double scalar_prox(double v, double tau) {
  auto f = [&](double u) { return tau * std::abs(u) + 0.5 * (u - v) * (u - v); };
  const double lo = -std::abs(v) - 1.0;
  const double hi = std::abs(v) + 1.0;
  const int steps = 4000;
  const double h = (hi - lo) / steps;
  double best = lo;
  for (int i = 0; i <= steps; ++i) {
    const double u = lo + i * h;
    if (f(u) < f(best)) best = u;
  }
  // right derivative of f; positive means the minimizer lies to the left
  auto slope = [&](double u) { return (u - v) + (u >= 0.0 ? tau : -tau); };
  double a = best - h;
  double b = best + h;
  for (int it = 0; it < 200 && b - a > 0.0; ++it) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    if (slope(m) > 0.0) {
      b = m;
    } else {
      a = m;
    }
  }
  const double refined = 0.5 * (a + b);
  if (a <= 0.0 && b >= 0.0) return f(0.0) <= f(refined) ? 0.0 : refined;
  return refined;
}

// Orthonormal multilevel 2-D Haar matrix action in Mallat layout, built from
// explicit single-level analysis matrices on the shrinking low band.
inline Matrix haar_level_matrix(int n) {
  Matrix m(static_cast<std::size_t>(n), Vector(static_cast<std::size_t>(n), 0.0));
  const double s = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < n / 2; ++k) {
    m[k][2 * k] = s;
    m[k][2 * k + 1] = s;
    m[n / 2 + k][2 * k] = s;
    m[n / 2 + k][2 * k + 1] = -s;
  }
  return m;
}

inline Vector haar2d(const Vector& block, int size, int levels) {
  Matrix x(static_cast<std::size_t>(size), Vector(static_cast<std::size_t>(size)));
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) x[r][c] = block[static_cast<std::size_t>(r * size + c)];
  }
  int extent = size;
  for (int l = 0; l < levels; ++l) {
    const Matrix h = haar_level_matrix(extent);
    Matrix sub(static_cast<std::size_t>(extent), Vector(static_cast<std::size_t>(extent)));
    for (int r = 0; r < extent; ++r) {
      for (int c = 0; c < extent; ++c) sub[r][c] = x[r][c];
    }
    const Matrix y = multiply(multiply(h, sub), transpose(h));
    for (int r = 0; r < extent; ++r) {
      for (int c = 0; c < extent; ++c) x[r][c] = y[r][c];
    }
    extent /= 2;
  }
  Vector out(static_cast<std::size_t>(size * size));
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) out[static_cast<std::size_t>(r * size + c)] = x[r][c];
  }
  return out;
}

// Orthonormal DCT-II by direct summation in long double.
inline Vector dct2(const Vector& v) {
  const std::size_t n = v.size();
  const long double pi = 3.141592653589793238462643383279502884L;
  Vector out(n);
  for (std::size_t k = 0; k < n; ++k) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      acc += static_cast<long double>(v[i]) *
             std::cos(pi * (2.0L * static_cast<long double>(i) + 1.0L) * static_cast<long double>(k) /
                      (2.0L * static_cast<long double>(n)));
    }
    const long double scale = std::sqrt((k == 0 ? 1.0L : 2.0L) / static_cast<long double>(n));
    out[k] = static_cast<double>(acc * scale);
  }
  return out;
}

}  // namespace oracle

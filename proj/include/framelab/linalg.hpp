#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "framelab/errors.hpp"
#include "framelab/matrix.hpp"

namespace framelab {

inline constexpr double kTolOrth = 1e-10;
inline constexpr int kJacobiMaxSweeps = 100;

/// Eigen-decomposition of a real symmetric matrix: A = M·diag(values)·Mᵀ.
///
/// Nonzero eigenvalues are sorted descending and followed by the exact
/// zeros, so the leading columns of `vectors` span the range of A.
struct SpectralDecomposition {
  std::vector<double> values;
  Matrix vectors;

  std::size_t nonzero_count() const {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return v != 0.0; }));
  }
};

using Complex = std::complex<double>;

/// All eigenvalues of a real matrix, with algebraic multiplicity.
struct ComplexSpectrum {
  std::vector<Complex> values;
  double radius = 0.0;
};

/// Threshold under which a symmetric eigenvalue is treated as exactly zero.
inline double zero_tolerance(double largest_magnitude) { return 1e-8 * std::max(1.0, largest_magnitude); }

namespace detail {

// Largest-magnitude entry made positive; near-ties resolve to the lowest index.
inline void normalize_sign(Matrix& v, std::size_t col) {
  double best = 0.0;
  for (std::size_t i = 0; i < v.rows(); ++i) best = std::max(best, std::abs(v(i, col)));
  for (std::size_t i = 0; i < v.rows(); ++i) {
    if (std::abs(v(i, col)) >= best - 1e-12) {
      if (v(i, col) < 0)
        for (std::size_t r = 0; r < v.rows(); ++r) v(r, col) = -v(r, col);
      return;
    }
  }
}

}  // namespace detail

/// Cyclic Jacobi eigensolver for real symmetric matrices.
///
/// The input is symmetrized by averaging first. Eigenvalues with
/// |λ| < zero_tolerance(max |λ|) are snapped to 0 and moved last.
/// Throws NumericalError if 100 sweeps do not annihilate the off-diagonal.
inline SpectralDecomposition sym_eig(const Matrix& input) {
  if (!input.square()) throw std::invalid_argument("sym_eig: matrix is not square");
  const std::size_t n = input.rows();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (input(i, j) + input(j, i));
  Matrix v = Matrix::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
  };
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) total += a(i, j) * a(i, j);
  const double target = std::numeric_limits<double>::epsilon() * std::sqrt(total);

  int sweep = 0;
  while (off_norm() > target) {
    if (++sweep > kJacobiMaxSweeps)
      throw NumericalError("sym_eig: Jacobi iteration did not converge in " + std::to_string(kJacobiMaxSweeps) +
                           " sweeps");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle annihilating a(p,q), chosen with |t| <= 1.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<double> raw(n);
  double largest = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    raw[i] = a(i, i);
    largest = std::max(largest, std::abs(raw[i]));
  }
  const double tol = zero_tolerance(largest);
  for (auto& x : raw)
    if (std::abs(x) < tol) x = 0.0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const bool zi = raw[i] == 0.0, zj = raw[j] == 0.0;
    if (zi != zj) return zj;
    return raw[i] > raw[j];
  });

  SpectralDecomposition out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = raw[order[c]];
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
    detail::normalize_sign(out.vectors, c);
  }
  return out;
}

/// Reduces a square matrix to upper Hessenberg form by Householder
/// similarity transforms. Entries below the subdiagonal are set to zero.
inline Matrix hessenberg(Matrix h) {
  const std::size_t n = h.rows();
  if (n < 3) return h;
  std::vector<double> ort(n, 0.0);
  const std::size_t high = n - 1;
  for (std::size_t m = 1; m < high; ++m) {
    double scale = 0.0;
    for (std::size_t i = m; i <= high; ++i) scale += std::abs(h(i, m - 1));
    if (scale == 0.0) continue;
    double hh = 0.0;
    for (std::size_t i = high + 1; i-- > m;) {
      ort[i] = h(i, m - 1) / scale;
      hh += ort[i] * ort[i];
    }
    double g = std::sqrt(hh);
    if (ort[m] > 0) g = -g;
    hh -= ort[m] * g;
    ort[m] -= g;
    for (std::size_t j = m; j < n; ++j) {
      double f = 0.0;
      for (std::size_t i = m; i <= high; ++i) f += ort[i] * h(i, j);
      f /= hh;
      for (std::size_t i = m; i <= high; ++i) h(i, j) -= f * ort[i];
    }
    for (std::size_t i = 0; i <= high; ++i) {
      double f = 0.0;
      for (std::size_t j = m; j <= high; ++j) f += ort[j] * h(i, j);
      f /= hh;
      for (std::size_t j = m; j <= high; ++j) h(i, j) -= f * ort[j];
    }
    ort[m] *= scale;
    h(m, m - 1) = scale * g;
  }
  for (std::size_t i = 2; i < n; ++i)
    for (std::size_t j = 0; j + 1 < i; ++j) h(i, j) = 0.0;
  return h;
}

/// Similarity scaling by powers of two so that each row and column pair has
/// comparable norm. Eigenvalues are unchanged.
inline Matrix balance(Matrix a) {
  const std::size_t n = a.rows();
  constexpr double radix = 2.0, sqrdx = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) {
          c += std::abs(a(j, i));
          r += std::abs(a(i, j));
        }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
  return a;
}

namespace detail {

// Francis double-shift QR on an upper Hessenberg matrix. Uses 1-based
// indexing internally (a[i][j] at (i-1, j-1)) to keep the classic recurrence
// readable. Deflates 1×1 and 2×2 blocks; 2×2 blocks yield conjugate pairs.
inline std::vector<Complex> hessenberg_qr(Matrix h) {
  const int n = static_cast<int>(h.rows());
  auto a = [&](int i, int j) -> double& { return h(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)); };
  std::vector<Complex> eig(static_cast<std::size_t>(n));
  auto put = [&](int i, double re, double im) { eig[static_cast<std::size_t>(i - 1)] = {re, im}; };
  constexpr double eps = std::numeric_limits<double>::epsilon();

  double anorm = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(a(i, j));

  const int max_total = 30 * n;
  int total = 0;
  int nn = n;
  double t = 0.0;
  while (nn >= 1) {
    int its = 0;
    int l = 1;
    do {
      for (l = nn; l >= 2; --l) {
        const double sub = std::abs(a(l, l - 1));
        if (sub <= std::numeric_limits<double>::min()) break;
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (sub <= eps * s) break;
        // Ahues–Tisseur test.
        const double ab = std::max(sub, std::abs(a(l - 1, l)));
        const double ba = std::min(sub, std::abs(a(l - 1, l)));
        const double diff = std::abs(a(l - 1, l - 1) - a(l, l));
        const double aa = std::max(std::abs(a(l, l)), diff);
        const double bb = std::min(std::abs(a(l, l)), diff);
        const double sum = aa + ab;
        if (ba * (ab / sum) <= std::max(std::numeric_limits<double>::min(), eps * (bb * (aa / sum)))) break;
      }
      if (l >= 2) a(l, l - 1) = 0.0;
      else l = 1;
      double x = a(nn, nn);
      if (l == nn) {
        put(nn, x + t, 0.0);
        --nn;
      } else {
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          double p = 0.5 * (y - x);
          double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + std::copysign(z, p);
            put(nn - 1, x + z, 0.0);
            put(nn, z != 0.0 ? x - w / z : x + z, 0.0);
          } else {
            put(nn - 1, x + p, -z);
            put(nn, x + p, z);
          }
          nn -= 2;
        } else {
          if (++total > max_total)
            throw NumericalError("general_eigenvalues: QR iteration did not converge in " +
                                 std::to_string(max_total) + " iterations");
          if (its == 10 || its == 20) {
            // Exceptional shift.
            t += x;
            for (int i = 1; i <= nn; ++i) a(i, i) -= x;
            double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          double p = 0, q = 0, r = 0, z = 0;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = a(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            double s = std::copysign(std::sqrt(p * p + q * q + r * r), p);
            if (s != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k != nn - 1) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k != nn - 1) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  return eig;
}

}  // namespace detail

/// Eigenvalues of a general real matrix via Hessenberg reduction and
/// shifted QR. Throws NumericalError past 30·m QR iterations.
inline ComplexSpectrum general_eigenvalues(const Matrix& a) {
  if (!a.square() || a.rows() == 0) throw std::invalid_argument("general_eigenvalues: need a non-empty square matrix");
  ComplexSpectrum out;
  out.values = detail::hessenberg_qr(hessenberg(balance(a)));
  for (const auto& z : out.values) out.radius = std::max(out.radius, std::abs(z));
  return out;
}

inline double spectral_radius(const Matrix& a) { return general_eigenvalues(a).radius; }

/// Numerical rank by Gaussian elimination with partial pivoting. A pivot
/// counts when its magnitude exceeds tol·max(1, ‖a‖∞).
inline std::size_t rank(Matrix a, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("rank: tolerance must be positive");
  const double threshold = tol * std::max(1.0, norm_inf(a));
  std::size_t r = 0;
  for (std::size_t col = 0; col < a.cols() && r < a.rows(); ++col) {
    std::size_t piv = r;
    for (std::size_t i = r + 1; i < a.rows(); ++i)
      if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
    if (std::abs(a(piv, col)) <= threshold) continue;
    if (piv != r)
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(r, j), a(piv, j));
    for (std::size_t i = r + 1; i < a.rows(); ++i) {
      const double f = a(i, col) / a(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
    }
    ++r;
  }
  return r;
}

/// f(A) = M·diag(f(λ))·Mᵀ for a symmetric A.
template <typename F>
Matrix symmetric_function(const SpectralDecomposition& d, F&& f) {
  const std::size_t n = d.values.size();
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(d.values[k]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += d.vectors(i, k) * fk * d.vectors(j, k);
  }
  return out;
}

/// Inverse of a symmetric positive-definite matrix. Throws NumericalError
/// when the condition estimate λmax/λmin exceeds max_condition.
inline Matrix spd_inverse(const Matrix& s, double max_condition = 1e12) {
  auto d = sym_eig(s);
  if (d.values.empty()) return s;
  const double hi = d.values.front();
  // Zero-snapped or negative eigenvalues land at the back.
  const double lo = *std::min_element(d.values.begin(), d.values.end());
  if (!(lo > 0.0) || hi / lo > max_condition)
    throw NumericalError("frame operator is numerically singular (condition estimate exceeds 1e12)");
  return symmetric_function(d, [](double x) { return 1.0 / x; });
}

/// Deviation of QᵀQ from the identity, entrywise.
inline double orthogonality_defect(const Matrix& q) {
  return max_abs_diff(q.transpose() * q, Matrix::identity(q.cols()));
}

}  // namespace framelab

namespace framelab {

/// Coefficients c_0..c_n of det(xI − A) = Σ c_j x^j by the Faddeev–LeVerrier
/// recurrence (trace-based, independent of the QR eigenvalue path).
inline std::vector<double> characteristic_polynomial(const Matrix& a) {
  if (!a.square()) throw std::invalid_argument("characteristic_polynomial: matrix is not square");
  const std::size_t n = a.rows();
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  Matrix m(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    m = a * m;
    for (std::size_t i = 0; i < n; ++i) m(i, i) += c[n - k + 1];
    c[n - k] = -trace(a * m) / static_cast<double>(k);
  }
  return c;
}

}  // namespace framelab

#ifndef SPURIDIUM_LINALG_HPP
#define SPURIDIUM_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace spuridium {

// Dense row-major matrix of doubles. Small on purpose: the library needs
// symmetric eigendecompositions and Gram-matrix assembly, nothing fancier.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      m(i, i) = 1.0;
    return m;
  }
};

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s += x[i] * y[i];
  return s;
}

inline double norm2(const std::vector<double>& x) { return std::sqrt(dot(x, x)); }

inline std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
  if (x.size() != a.cols)
    throw std::invalid_argument("matvec: dimension mismatch");
  std::vector<double> y(a.rows, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* row = a.data.data() + i * a.cols;
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j)
      s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows)
    throw std::invalid_argument("matmul: dimension mismatch");
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = a.data.data() + i * a.cols;
    double* crow = c.data.data() + i * b.cols;
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      if (aik == 0.0)
        continue;
      const double* brow = b.data.data() + k * b.cols;
      for (std::size_t j = 0; j < b.cols; ++j)
        crow[j] += aik * brow[j];
    }
  }
  return c;
}

// Replace a by (a + a^T)/2. Exact symmetry afterwards, bit for bit.
inline void symmetrize(Matrix& a) {
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = i + 1; j < a.cols; ++j) {
      const double m = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = m;
      a(j, i) = m;
    }
}

inline double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data)
    m = std::max(m, std::abs(v));
  return m;
}

inline double max_asymmetry(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = i + 1; j < a.cols; ++j)
      m = std::max(m, std::abs(a(i, j) - a(j, i)));
  return m;
}

namespace detail {

// Householder reduction of a real symmetric matrix to tridiagonal form,
// accumulating the orthogonal transformation in v. This is the classic
// tred2 procedure (Bowdler, Martin, Reinsch, Wilkinson; Handbook for
// Automatic Computation Vol. II) in its EISPACK/JAMA form, 0-based.
inline void householder_tridiag(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = v.rows;
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  if (n == 0)
    return;

  for (std::size_t j = 0; j < n; ++j)
    d[j] = v(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    // Scale to avoid under/overflow.
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k)
      scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      // Generate Householder vector.
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0)
        g = -g;
      e[i] = scale * g;
      h = h - f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j)
        e[j] = 0.0;

      // Apply similarity transformation to remaining columns.
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (std::size_t k = j + 1; k <= i - 1; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j)
        e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k <= i - 1; ++k)
          v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  // Accumulate transformations.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k)
        d[k] = v(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k)
          g += v(k, i + 1) * v(k, j);
        for (std::size_t k = 0; k <= i; ++k)
          v(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k)
      v(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit-shift QL iteration for a symmetric tridiagonal matrix
// (diagonal d, off-diagonal e with e[0] unused), rotations accumulated
// into the columns of z. EISPACK tql2 lineage. Throws after 30 sweeps
// on any single eigenvalue (30*n total cap).
inline void tridiag_ql(std::vector<double>& d, std::vector<double>& e, Matrix& z) {
  const std::size_t n = d.size();
  if (n == 0)
    return;
  for (std::size_t i = 1; i < n; ++i)
    e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = 2.220446049250313e-16;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1)
        break;
      ++m;
    }

    // If m == l, d[l] is an eigenvalue; otherwise iterate.
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 30)
          throw std::runtime_error("tridiag_ql: no convergence in 30 sweeps");

        // Compute implicit shift.
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0)
          r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i)
          d[i] -= h;
        f += h;

        // Implicit QL sweep.
        p = d[m];
        double c = 1.0;
        double c2 = c;
        double c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0;
        double s2 = 0.0;
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);

          // Accumulate rotation.
          for (std::size_t k = 0; k < z.rows; ++k) {
            h = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * h;
            z(k, i) = c * z(k, i) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

// Sort eigenvalues ascending and permute the columns of z to match.
inline void sort_eigenpairs(std::vector<double>& d, Matrix& z) {
  const std::size_t n = d.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&d](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  std::vector<double> ds(n);
  Matrix zs(z.rows, z.cols);
  for (std::size_t j = 0; j < n; ++j) {
    ds[j] = d[idx[j]];
    for (std::size_t k = 0; k < z.rows; ++k)
      zs(k, j) = z(k, idx[j]);
  }
  d.swap(ds);
  z.data.swap(zs.data);
}

}  // namespace detail

// Eigenvalues and eigenvectors of the symmetric tridiagonal matrix with
// diagonal alpha and off-diagonal beta. Returns ascending values; the
// columns of the second member are the corresponding eigenvectors in the
// tridiagonal basis.
inline std::pair<std::vector<double>, Matrix> tridiag_eigh(const std::vector<double>& alpha,
                                                           const std::vector<double>& beta) {
  const std::size_t n = alpha.size();
  if (beta.size() + 1 != n && !(n == 0 && beta.empty()))
    throw std::invalid_argument("tridiag_eigh: beta must have length alpha.size()-1");
  std::vector<double> d = alpha;
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    e[i] = beta[i - 1];
  Matrix z = Matrix::identity(n);
  detail::tridiag_ql(d, e, z);
  detail::sort_eigenpairs(d, z);
  return {std::move(d), std::move(z)};
}

}  // namespace spuridium

#endif  // SPURIDIUM_LINALG_HPP

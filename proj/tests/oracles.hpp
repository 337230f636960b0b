#pragma once
// Test-only reference computations, deliberately independent of the library's
// numerical routes.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;

// Durand-Kerner iteration for a monic polynomial given by coefficients of
// z^0..z^{n-1}.
inline std::vector<Complex> durand_kerner(const std::vector<Complex>& lower) {
  const std::size_t n = lower.size();
  auto eval = [&](Complex z) {
    Complex v = 1.0;
    for (std::size_t k = n; k-- > 0;) v = v * z + lower[k];
    return v;
  };
  std::vector<Complex> z(n);
  const Complex seed(0.4, 0.9);
  for (std::size_t i = 0; i < n; ++i) z[i] = std::pow(seed, static_cast<double>(i));
  for (int it = 0; it < 2000; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex denom = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) denom *= z[i] - z[j];
      const Complex step = eval(z[i]) / denom;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15) break;
  }
  return z;
}

// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

// Matrix of -g'' + g with mirrored ghost nodes at both ends.
inline std::vector<std::vector<double>> helmholtz_matrix(std::size_t n, double dx) {
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  const double k = 1.0 / (dx * dx);
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = 1.0 + 2.0 * k;
    if (i == 0) {
      a[i][1] = -2.0 * k;
    } else if (i == n - 1) {
      a[i][n - 2] = -2.0 * k;
    } else {
      a[i][i - 1] = -k;
      a[i][i + 1] = -k;
    }
  }
  return a;
}

}  // namespace oracle

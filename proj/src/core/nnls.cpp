#include "core/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "core/errors.hpp"

namespace schedlaw {

namespace {

// Dense symmetric matrix in row-major order, k x k.
using Matrix = std::vector<double>;

// Eigendecomposition by cyclic Jacobi rotations. Returns eigenvalues in
// `eig`; V gets the eigenvectors as columns. Sizes here are tiny (k <= 3 in
// practice), so simplicity beats speed.
void jacobi_eigen(Matrix a, std::size_t k, std::vector<double>& eig,
                  Matrix& V) {
  V.assign(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) V[i * k + i] = 1.0;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t q = p + 1; q < k; ++q) off += std::fabs(a[p * k + q]);
    if (off == 0.0) break;
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        const double apq = a[p * k + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * k + q] - a[p * k + p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < k; ++i) {
          const double aip = a[i * k + p];
          const double aiq = a[i * k + q];
          a[i * k + p] = c * aip - s * aiq;
          a[i * k + q] = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < k; ++i) {
          const double api = a[p * k + i];
          const double aqi = a[q * k + i];
          a[p * k + i] = c * api - s * aqi;
          a[q * k + i] = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < k; ++i) {
          const double vip = V[i * k + p];
          const double viq = V[i * k + q];
          V[i * k + p] = c * vip - s * viq;
          V[i * k + q] = s * vip + c * viq;
        }
      }
    }
  }
  eig.resize(k);
  for (std::size_t i = 0; i < k; ++i) eig[i] = a[i * k + i];
}

// Solves the SPD system a z = b by Cholesky; returns false when a pivot
// collapses (rank-deficient Gram submatrix).
bool cholesky_solve(Matrix a, std::size_t k, std::vector<double> b,
                    std::vector<double>& z) {
  double diag_max = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    diag_max = std::max(diag_max, std::fabs(a[i * k + i]));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i * k + j];
      for (std::size_t p = 0; p < j; ++p) sum -= a[i * k + p] * a[j * k + p];
      if (i == j) {
        if (sum <= 1e-12 * diag_max) return false;
        a[i * k + i] = std::sqrt(sum);
      } else {
        a[i * k + j] = sum / a[j * k + j];
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    double sum = b[i];
    for (std::size_t p = 0; p < i; ++p) sum -= a[i * k + p] * b[p];
    b[i] = sum / a[i * k + i];
  }
  z.assign(k, 0.0);
  for (std::size_t i = k; i-- > 0;) {
    double sum = b[i];
    for (std::size_t p = i + 1; p < k; ++p) sum -= a[p * k + i] * z[p];
    z[i] = sum / a[i * k + i];
  }
  return true;
}

void pseudo_inverse_solve(const Matrix& a, std::size_t k,
                          const std::vector<double>& b,
                          std::vector<double>& z) {
  std::vector<double> eig;
  Matrix V;
  jacobi_eigen(a, k, eig, V);
  double eig_max = 0.0;
  for (double e : eig) eig_max = std::max(eig_max, std::fabs(e));
  const double cutoff = 1e-12 * std::max(eig_max, 1e-300);
  z.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (std::fabs(eig[i]) <= cutoff) continue;
    double vb = 0.0;
    for (std::size_t r = 0; r < k; ++r) vb += V[r * k + i] * b[r];
    vb /= eig[i];
    for (std::size_t r = 0; r < k; ++r) z[r] += V[r * k + i] * vb;
  }
}

}  // namespace

NnlsResult nnls(const std::vector<std::vector<double>>& columns,
                const std::vector<double>& y) {
  const std::size_t n = columns.size();
  const std::size_t m = y.size();
  if (n == 0 || m == 0) {
    throw validation_error("nnls needs at least one column and one row");
  }
  for (const auto& col : columns) {
    if (col.size() != m) {
      throw validation_error("nnls column length does not match y");
    }
    for (double v : col) {
      if (!std::isfinite(v)) throw validation_error("nnls: non-finite entry");
    }
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw validation_error("nnls: non-finite target");
  }

  NnlsResult result;

  // Rescale columns to unit max-abs so the Gram matrix is well conditioned.
  std::vector<double> scale(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    double mx = 0.0;
    for (double v : columns[j]) mx = std::max(mx, std::fabs(v));
    if (mx > 0.0) {
      scale[j] = mx;
    } else {
      result.collinearity_warning = true;  // identically zero column
    }
  }

  Matrix gram(n * n, 0.0);
  std::vector<double> aty(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < m; ++r) acc += columns[i][r] * columns[j][r];
      acc /= scale[i] * scale[j];
      gram[i * n + j] = acc;
      gram[j * n + i] = acc;
    }
    double acc = 0.0;
    for (std::size_t r = 0; r < m; ++r) acc += columns[i][r] * y[r];
    aty[i] = acc / scale[i];
  }
  double aty_norm = 1.0;
  for (double v : aty) aty_norm = std::max(aty_norm, std::fabs(v));
  const double tol = 1e-12 * aty_norm;

  std::vector<bool> active(n, false);
  std::vector<double> x(n, 0.0);
  std::vector<std::size_t> passive;

  auto solve_passive = [&](std::vector<double>& z) {
    const std::size_t k = passive.size();
    Matrix sub(k * k);
    std::vector<double> rhs(k);
    for (std::size_t a = 0; a < k; ++a) {
      rhs[a] = aty[passive[a]];
      for (std::size_t b = 0; b < k; ++b) {
        sub[a * k + b] = gram[passive[a] * n + passive[b]];
      }
    }
    if (!cholesky_solve(sub, k, rhs, z)) {
      result.collinearity_warning = true;
      pseudo_inverse_solve(sub, k, rhs, z);
    }
  };

  const int max_outer = 30 + 10 * static_cast<int>(n);
  for (int outer = 0; outer < max_outer; ++outer) {
    // Gradient of the residual wrt the inactive coordinates.
    std::vector<double> w(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double g = aty[j];
      for (std::size_t i = 0; i < n; ++i) g -= gram[j * n + i] * x[i];
      w[j] = g;
    }
    std::size_t best = n;
    double best_w = tol;
    for (std::size_t j = 0; j < n; ++j) {
      if (!active[j] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    }
    if (best == n) break;
    ++result.iterations;
    active[best] = true;
    passive.push_back(best);

    for (int inner = 0; inner < max_outer; ++inner) {
      std::vector<double> z;
      solve_passive(z);
      bool feasible = true;
      for (double zp : z) {
        if (zp <= 0.0) feasible = false;
      }
      if (feasible) {
        for (std::size_t a = 0; a < passive.size(); ++a) x[passive[a]] = z[a];
        break;
      }
      double alpha = 1.0;
      for (std::size_t a = 0; a < passive.size(); ++a) {
        if (z[a] <= 0.0) {
          const double xa = x[passive[a]];
          alpha = std::min(alpha, xa / (xa - z[a]));
        }
      }
      for (std::size_t a = 0; a < passive.size(); ++a) {
        const std::size_t j = passive[a];
        x[j] += alpha * (z[a] - x[j]);
      }
      std::vector<std::size_t> keep;
      for (std::size_t j : passive) {
        if (x[j] > 1e-14) {
          keep.push_back(j);
        } else {
          x[j] = 0.0;
          active[j] = false;
        }
      }
      passive = keep;
      if (passive.empty()) break;
    }
  }

  // Stationarity: gradient must vanish on the support and point the wrong
  // way off it.
  double kkt = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double g = -aty[j];
    for (std::size_t i = 0; i < n; ++i) g += gram[j * n + i] * x[i];
    if (x[j] > 0.0) {
      kkt = std::max(kkt, std::fabs(g));
    } else {
      kkt = std::max(kkt, std::max(0.0, -g));
    }
  }
  result.kkt_residual = kkt / aty_norm;

  result.x.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) result.x[j] = x[j] / scale[j];
  return result;
}

}  // namespace schedlaw

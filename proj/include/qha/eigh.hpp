#pragma once

// Hermitian eigendecomposition by cyclic complex Jacobi rotations.

#include <qha/operators.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace qha {

struct EigenDecomposition {
  std::vector<double> eigenvalues;        ///< non-increasing
  std::vector<SignalVector> eigenvectors; ///< k-th paired with k-th eigenvalue
  bool degenerate = false;                ///< set by callers that truncate the spectrum
  int sweeps = 0;

  int dim() const noexcept { return static_cast<int>(eigenvalues.size()); }

  /// sum_k lambda_k v_k v_k^*.
  OperatorMatrix reconstruct() const {
    const int N = dim();
    OperatorMatrix A(N);
    for (int k = 0; k < N; ++k) {
      const auto &v = eigenvectors[k];
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          A(i, j) += eigenvalues[k] * v[i] * std::conj(v[j]);
    }
    return A;
  }
};

inline constexpr double kDefaultHermitianTol = 1e-8;

/// Eigenvalues sorted descending with orthonormal eigenvectors. The input is
/// symmetrised before the sweep; it must be Hermitian to within
/// `hermitian_tol` (max-entry deviation).
inline EigenDecomposition eigh(const OperatorMatrix &input,
                               double hermitian_tol = kDefaultHermitianTol) {
  const double herm = input.hermitian_residual();
  if (!(herm <= hermitian_tol))
    throw NotHermitian("max |A - A*| = " + std::to_string(herm));

  const int N = input.dim();
  OperatorMatrix A = input.hermitian_part();
  OperatorMatrix V = OperatorMatrix::identity(N);

  const double fro = A.frobenius_norm();
  auto off_mass = [&] {
    double s = 0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        if (i != j)
          s += std::norm(A(i, j));
    return std::sqrt(s);
  };

  EigenDecomposition out;
  constexpr int kMaxSweeps = 100;
  const double stop = 1e-14 * fro;
  while (out.sweeps < kMaxSweeps && off_mass() > stop) {
    ++out.sweeps;
    for (int p = 0; p < N - 1; ++p)
      for (int q = p + 1; q < N; ++q) {
        const cplx apq = A(p, q);
        const double r = std::abs(apq);
        if (r <= 1e-300 || r < 1e-18 * fro)
          continue;
        const double app = A(p, p).real(), aqq = A(q, q).real();
        // Unitary W acting on columns p, q: a phase making a_pq real,
        // followed by a real rotation annihilating it.
        const cplx phase = std::conj(apq) / r; // e^{-i arg a_pq}
        const double theta = (aqq - app) / (2.0 * r);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const cplx wpp = c, wpq = s, wqp = -s * phase, wqq = c * phase;

        for (int k = 0; k < N; ++k) {
          const cplx akp = A(k, p), akq = A(k, q);
          A(k, p) = akp * wpp + akq * wqp;
          A(k, q) = akp * wpq + akq * wqq;
        }
        for (int k = 0; k < N; ++k) {
          const cplx apk = A(p, k), aqk = A(q, k);
          A(p, k) = std::conj(wpp) * apk + std::conj(wqp) * aqk;
          A(q, k) = std::conj(wpq) * apk + std::conj(wqq) * aqk;
        }
        A(p, q) = 0;
        A(q, p) = 0;
        A(p, p) = A(p, p).real();
        A(q, q) = A(q, q).real();
        for (int k = 0; k < N; ++k) {
          const cplx vkp = V(k, p), vkq = V(k, q);
          V(k, p) = vkp * wpp + vkq * wqp;
          V(k, q) = vkp * wpq + vkq * wqq;
        }
      }
  }

  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return A(a, a).real() > A(b, b).real(); });

  out.eigenvalues.reserve(N);
  out.eigenvectors.reserve(N);
  for (int k : order) {
    out.eigenvalues.push_back(A(k, k).real());
    SignalVector v(N);
    for (int i = 0; i < N; ++i)
      v[i] = V(i, k);
    out.eigenvectors.push_back(std::move(v));
  }
  return out;
}

/// Smallest eigenvalue of a Hermitian operator.
inline double min_eigenvalue(const OperatorMatrix &A, double hermitian_tol = kDefaultHermitianTol) {
  return eigh(A, hermitian_tol).eigenvalues.back();
}

} // namespace qha

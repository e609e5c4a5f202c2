#pragma once

// Convolutions of quantum harmonic analysis on the finite phase space.
//
//   f * S  = w sum_z f(z) alpha_z(S)                (function -> operator)
//   S * T  (z) = tr(S alpha_z(T_check))              (operator -> function)
//   f * g  (z) = w sum_z' f(z') g(z - z')           (function -> function)
//
// With w = 1/N the finite resolution of identity reads
//   w sum_z alpha_z(S) = tr(S) I.
//
// Both operator convolutions are evaluated in O(N^3) by grouping the
// double sums along diagonals t - u = d, where the conjugation by pi(z)
// reduces to an index shift and the phase exp(2 pi i n d / N).

#include <qha/operators.hpp>
#include <qha/parallel.hpp>

#include <type_traits>

namespace qha {

namespace detail {

/// value(m, n) = sum_{t,u} S[u, t] exp(2 pi i n (t-u)/N) X[t-m, u-m]
///             = tr(S alpha_{(m,n)}(X)).
inline ComplexGrid trace_against_translates(const OperatorMatrix &S, const OperatorMatrix &X) {
  const int N = S.dim();
  if (X.dim() != N)
    throw DimensionMismatch("operators of different dimension");
  const PhaseLattice lat(N);
  const RootsOfUnity e(N);
  ComplexGrid out(lat);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t mi) {
    const int m = static_cast<int>(mi);
    std::vector<cplx> c(N);
    for (int d = 0; d < N; ++d) {
      cplx s = 0;
      for (int u = 0; u < N; ++u) {
        const int t = wrap_index(u + d, N);
        s += S(u, t) * X(wrap_index(t - m, N), wrap_index(u - m, N));
      }
      c[d] = s;
    }
    for (int n = 0; n < N; ++n) {
      cplx v = 0;
      for (int d = 0; d < N; ++d)
        v += e(static_cast<long long>(n) * d) * c[d];
      out(m, n) = v;
    }
  });
  return out;
}

} // namespace detail

/// f * S = w sum_z f(z) alpha_z(S).
template <class T> OperatorMatrix fun_op_conv(const Grid<T> &f, const OperatorMatrix &S) {
  const int N = S.dim();
  if (f.N() != N)
    throw DimensionMismatch("function lattice and operator dimension differ");
  const RootsOfUnity e(N);
  const double w = f.lattice().weight();

  // F[m][d] = sum_n f(m, n) exp(2 pi i n d / N)
  std::vector<cplx> F(static_cast<std::size_t>(N) * N);
  for (int m = 0; m < N; ++m)
    for (int d = 0; d < N; ++d) {
      cplx s = 0;
      for (int n = 0; n < N; ++n)
        if (f(m, n) != T{})
          s += cplx(f(m, n)) * e(static_cast<long long>(n) * d);
      F[static_cast<std::size_t>(m) * N + d] = s;
    }

  OperatorMatrix out(N);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t ti) {
    const int t = static_cast<int>(ti);
    for (int u = 0; u < N; ++u) {
      const int d = wrap_index(t - u, N);
      cplx s = 0;
      for (int m = 0; m < N; ++m) {
        const cplx Fm = F[static_cast<std::size_t>(m) * N + d];
        if (Fm != cplx{})
          s += Fm * S(wrap_index(t - m, N), wrap_index(u - m, N));
      }
      out(t, u) = w * s;
    }
  });
  return out;
}

/// (S * T)(z) = tr(S alpha_z(P T P)).
inline ComplexGrid op_op_conv(const OperatorMatrix &S, const OperatorMatrix &T) {
  return detail::trace_against_translates(S, parity_conjugate(T));
}

/// S~(z) = (S * S_check)(z) = tr(S alpha_z(S)), the phase-space
/// autocorrelation of S. Real for Hermitian S; the imaginary rounding residue
/// is dropped.
inline RealGrid s_tilde(const OperatorMatrix &S) {
  return real_part(detail::trace_against_translates(S, S));
}

/// Cyclic convolution (f * g)(z) = w sum_z' f(z') g(z - z').
template <class T> Grid<T> fun_fun_conv(const Grid<T> &f, const Grid<T> &g) {
  if (!(f.lattice() == g.lattice()))
    throw DimensionMismatch("grids live on different lattices");
  const int N = f.N();
  const double w = f.lattice().weight();
  Grid<T> out(f.lattice());
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t mi) {
    const int m = static_cast<int>(mi);
    for (int n = 0; n < N; ++n) {
      T s{};
      for (int a = 0; a < N; ++a) {
        const int ma = wrap_index(m - a, N);
        for (int b = 0; b < N; ++b)
          s += f(a, b) * g(ma, wrap_index(n - b, N));
      }
      out(m, n) = s * w;
    }
  });
  return out;
}

} // namespace qha

#pragma once

// Dense operators on C^N and the finite Weyl-Heisenberg group.
//
// The time-frequency shift is pi(m, n) = M_n T_m, i.e.
//   (pi(m, n) psi)(t) = exp(2 pi i n t / N) psi(t - m),
// so pi(m, n) pi(m', n') = exp(-2 pi i n m' / N) pi(m + m', n + n').

#include <qha/grid.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace qha {

using SignalVector = std::vector<cplx>;

/// exp(2 pi i k / N) for k = 0..N-1, evaluated per residue so that phases of
/// equal residues are bit-identical.
class RootsOfUnity {
public:
  explicit RootsOfUnity(int N) : N_(N), table_(N) {
    for (int k = 0; k < N; ++k) {
      const double a = 2.0 * std::numbers::pi * k / N;
      table_[k] = {std::cos(a), std::sin(a)};
    }
  }
  cplx operator()(long long k) const { return table_[wrap_index(k, N_)]; }

private:
  int N_;
  std::vector<cplx> table_;
};

class OperatorMatrix {
public:
  explicit OperatorMatrix(int N) : N_(N), data_(static_cast<std::size_t>(N) * N) {
    if (N < 1)
      throw BadArgument("operator dimension must be positive");
  }

  static OperatorMatrix identity(int N) {
    OperatorMatrix I(N);
    for (int i = 0; i < N; ++i)
      I(i, i) = 1.0;
    return I;
  }

  /// psi phi^* (the rank-one operator psi (x) phi).
  static OperatorMatrix outer(std::span<const cplx> psi, std::span<const cplx> phi) {
    if (psi.size() != phi.size())
      throw DimensionMismatch("outer product of vectors of different length");
    const int N = static_cast<int>(psi.size());
    OperatorMatrix A(N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        A(i, j) = psi[i] * std::conj(phi[j]);
    return A;
  }

  int dim() const noexcept { return N_; }

  cplx &operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * N_ + j]; }
  const cplx &operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * N_ + j];
  }
  std::span<cplx> values() noexcept { return data_; }
  std::span<const cplx> values() const noexcept { return data_; }

  cplx trace() const {
    cplx s = 0;
    for (int i = 0; i < N_; ++i)
      s += (*this)(i, i);
    return s;
  }

  OperatorMatrix adjoint() const {
    OperatorMatrix A(N_);
    for (int i = 0; i < N_; ++i)
      for (int j = 0; j < N_; ++j)
        A(i, j) = std::conj((*this)(j, i));
    return A;
  }

  /// (A + A^*) / 2.
  OperatorMatrix hermitian_part() const {
    OperatorMatrix A(N_);
    for (int i = 0; i < N_; ++i)
      for (int j = 0; j < N_; ++j)
        A(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
    return A;
  }

  /// max |A - A^*| entry.
  double hermitian_residual() const {
    double r = 0;
    for (int i = 0; i < N_; ++i)
      for (int j = i; j < N_; ++j)
        r = std::max(r, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return r;
  }

  double max_abs() const {
    double r = 0;
    for (const auto &v : data_)
      r = std::max(r, std::abs(v));
    return r;
  }

  double frobenius_norm() const {
    double s = 0;
    for (const auto &v : data_)
      s += std::norm(v);
    return std::sqrt(s);
  }

  OperatorMatrix &operator+=(const OperatorMatrix &o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i)
      data_[i] += o.data_[i];
    return *this;
  }
  OperatorMatrix &operator-=(const OperatorMatrix &o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i)
      data_[i] -= o.data_[i];
    return *this;
  }
  OperatorMatrix &operator*=(cplx s) {
    for (auto &v : data_)
      v *= s;
    return *this;
  }
  friend OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix &b) { return a += b; }
  friend OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix &b) { return a -= b; }
  friend OperatorMatrix operator*(cplx s, OperatorMatrix a) { return a *= s; }

  friend OperatorMatrix operator*(const OperatorMatrix &a, const OperatorMatrix &b) {
    a.check_same(b);
    const int N = a.N_;
    OperatorMatrix c(N);
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < N; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{})
          continue;
        for (int j = 0; j < N; ++j)
          c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend SignalVector operator*(const OperatorMatrix &a, std::span<const cplx> x) {
    if (static_cast<int>(x.size()) != a.N_)
      throw DimensionMismatch("vector length " + std::to_string(x.size()) +
                              " does not match operator dimension " + std::to_string(a.N_));
    SignalVector y(a.N_);
    for (int i = 0; i < a.N_; ++i) {
      cplx s = 0;
      for (int j = 0; j < a.N_; ++j)
        s += a(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  bool operator==(const OperatorMatrix &) const = default;

private:
  void check_same(const OperatorMatrix &o) const {
    if (o.N_ != N_)
      throw DimensionMismatch("operators of dimension " + std::to_string(N_) + " and " +
                              std::to_string(o.N_));
  }

  int N_;
  std::vector<cplx> data_;
};

inline cplx trace(const OperatorMatrix &A) { return A.trace(); }
inline OperatorMatrix adjoint(const OperatorMatrix &A) { return A.adjoint(); }
inline OperatorMatrix matmul(const OperatorMatrix &A, const OperatorMatrix &B) { return A * B; }
inline SignalVector apply(const OperatorMatrix &A, std::span<const cplx> x) { return A * x; }

inline double max_abs_diff(const OperatorMatrix &A, const OperatorMatrix &B) {
  if (A.dim() != B.dim())
    throw DimensionMismatch("operators of different dimension");
  double r = 0;
  for (std::size_t i = 0; i < A.values().size(); ++i)
    r = std::max(r, std::abs(A.values()[i] - B.values()[i]));
  return r;
}

/// <x, y> = sum x_t conj(y_t), linear in the first argument.
inline cplx inner(std::span<const cplx> x, std::span<const cplx> y) {
  if (x.size() != y.size())
    throw DimensionMismatch("inner product of vectors of different length");
  cplx s = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s += x[i] * std::conj(y[i]);
  return s;
}

inline double norm(std::span<const cplx> x) { return std::sqrt(std::real(inner(x, x))); }

// ---------------------------------------------------------------------------
// Time-frequency shifts.

inline OperatorMatrix tf_shift(const PhaseLattice &lat, int m, int n) {
  const int N = lat.N();
  const RootsOfUnity e(N);
  OperatorMatrix A(N);
  for (int t = 0; t < N; ++t)
    A(t, wrap_index(t - m, N)) = e(static_cast<long long>(n) * t);
  return A;
}

inline SignalVector apply_tf_shift(std::span<const cplx> psi, int m, int n) {
  const int N = static_cast<int>(psi.size());
  const RootsOfUnity e(N);
  SignalVector out(N);
  for (int t = 0; t < N; ++t)
    out[t] = e(static_cast<long long>(n) * t) * psi[wrap_index(t - m, N)];
  return out;
}

/// P S P with (P psi)(t) = psi(-t).
inline OperatorMatrix parity_conjugate(const OperatorMatrix &S) {
  const int N = S.dim();
  OperatorMatrix out(N);
  for (int t = 0; t < N; ++t)
    for (int u = 0; u < N; ++u)
      out(t, u) = S(wrap_index(-t, N), wrap_index(-u, N));
  return out;
}

/// alpha_z(S) = pi(z) S pi(z)^*, computed as a phase-twisted index shift:
///   alpha_z(S)[t, u] = exp(2 pi i n (t - u) / N) S[t - m, u - m].
inline OperatorMatrix translate_op(const OperatorMatrix &S, LatticePoint z) {
  const int N = S.dim();
  const RootsOfUnity e(N);
  OperatorMatrix out(N);
  for (int t = 0; t < N; ++t)
    for (int u = 0; u < N; ++u)
      out(t, u) = e(static_cast<long long>(z.n) * (t - u)) *
                  S(wrap_index(t - z.m, N), wrap_index(u - z.m, N));
  return out;
}

/// V_phi psi(m, n) = <psi, pi(m, n) phi> on the whole lattice.
inline ComplexGrid stft(std::span<const cplx> psi, std::span<const cplx> phi) {
  if (psi.size() != phi.size())
    throw DimensionMismatch("stft of vectors of different length");
  const int N = static_cast<int>(psi.size());
  const PhaseLattice lat(N);
  const RootsOfUnity e(N);
  ComplexGrid V(lat);
  std::vector<cplx> prod(N);
  for (int m = 0; m < N; ++m) {
    for (int t = 0; t < N; ++t)
      prod[t] = psi[t] * std::conj(phi[wrap_index(t - m, N)]);
    for (int n = 0; n < N; ++n) {
      cplx s = 0;
      for (int t = 0; t < N; ++t)
        s += prod[t] * e(-static_cast<long long>(n) * t);
      V(m, n) = s;
    }
  }
  return V;
}

} // namespace qha

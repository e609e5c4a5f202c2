#pragma once

// Cohen class distributions Q_S(psi) and the accumulated distribution
//   rho_Omega^S = sum_{k <= A_Omega} Q_S(h_k),
// with h_k the eigenvectors of chi_Omega * S.

#include <qha/localization.hpp>

namespace qha {

/// Q_S(psi)(z) = <S pi(z)^* psi, pi(z)^* psi>, evaluated per time shift m
/// along the diagonals of S.
inline RealGrid cohen_distribution(const OperatorMatrix &S, std::span<const cplx> psi) {
  const int N = S.dim();
  if (static_cast<int>(psi.size()) != N)
    throw DimensionMismatch("signal length does not match state dimension");
  const PhaseLattice lat(N);
  const RootsOfUnity e(N);
  RealGrid Q(lat);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t mi) {
    const int m = static_cast<int>(mi);
    std::vector<cplx> c(N);
    for (int d = 0; d < N; ++d) {
      cplx s = 0;
      for (int u = 0; u < N; ++u)
        s += S(wrap_index(u + d, N), u) * std::conj(psi[wrap_index(u + d + m, N)]) *
             psi[wrap_index(u + m, N)];
      c[d] = s;
    }
    for (int n = 0; n < N; ++n) {
      cplx v = 0;
      for (int d = 0; d < N; ++d)
        v += e(static_cast<long long>(n) * d) * c[d];
      Q(m, n) = v.real();
    }
  });
  return Q;
}
inline RealGrid cohen_distribution(const DensityOperator &S, std::span<const cplx> psi) {
  return cohen_distribution(S.matrix(), psi);
}

struct AccumulatedDistribution {
  RealGrid grid;
  Domain domain;
  int A = 0;
  bool degenerate = false;
  std::string state_label;
};

inline AccumulatedDistribution accumulate(const LocalizationResult &r, const DensityOperator &S) {
  if (!(r.state == S))
    throw MismatchedState("localization result was computed for '" + r.state_label() +
                          "', not '" + S.label() + "'");
  RealGrid rho(r.domain.lattice());
  for (int k = 0; k < r.A; ++k)
    rho += cohen_distribution(S, r.eig.eigenvectors[k]);
  return AccumulatedDistribution{std::move(rho), r.domain, r.A, r.degenerate(), S.label()};
}

/// w sum_z |rho(z) - chi_Omega(z)|.
inline double l1_error(const AccumulatedDistribution &rho) {
  const RealGrid chi = indicator(rho.domain);
  double s = 0;
  for (std::size_t i = 0; i < chi.size(); ++i)
    s += std::abs(rho.grid[i] - chi[i]);
  return rho.grid.lattice().weight() * s;
}

/// w #{z : |rho(z) - chi_Omega(z)| > delta}.
inline double levelset_measure(const AccumulatedDistribution &rho, double delta) {
  if (!(delta > 0))
    throw BadDelta("level must be positive");
  const RealGrid chi = indicator(rho.domain);
  std::size_t c = 0;
  for (std::size_t i = 0; i < chi.size(); ++i)
    c += std::abs(rho.grid[i] - chi[i]) > delta;
  return rho.grid.lattice().weight() * static_cast<double>(c);
}

/// w sum_z |a(z) - b(z)|.
inline double l1_distance(const RealGrid &a, const RealGrid &b) {
  if (!(a.lattice() == b.lattice()))
    throw DimensionMismatch("grids live on different lattices");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += std::abs(a[i] - b[i]);
  return a.lattice().weight() * s;
}

/// sum_k lambda_k Q_S(h_k) over the full spectrum.
inline RealGrid weighted_eigen_expansion(const LocalizationResult &r) {
  RealGrid out(r.domain.lattice());
  for (int k = 0; k < r.dim(); ++k) {
    RealGrid q = cohen_distribution(r.state, r.eig.eigenvectors[k]);
    q *= r.eig.eigenvalues[k];
    out += q;
  }
  return out;
}

/// max_z |(chi_Omega * S~)(z) - sum_k lambda_k Q_S(h_k)(z)|.
inline double reconstruction_identity_check(const Domain &omega, const DensityOperator &S) {
  const RealGrid left = fun_fun_conv(indicator(omega), s_tilde(S.matrix()));
  const RealGrid right = weighted_eigen_expansion(analyze(omega, S));
  return max_abs_diff(left, right);
}

} // namespace qha

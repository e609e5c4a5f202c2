#pragma once

// Mixed-state localization operators chi_Omega * S and their spectra.

#include <qha/states.hpp>

#include <cmath>
#include <optional>

namespace qha {

/// chi_Omega * S = w sum_{z in Omega} alpha_z(S).
inline OperatorMatrix localization_operator(const Domain &omega, const DensityOperator &S) {
  if (omega.lattice().N() != S.dim())
    throw DimensionMismatch("domain lattice and state dimension differ");
  return fun_op_conv(indicator(omega), S.matrix()).hermitian_part();
}

struct LocalizationResult {
  OperatorMatrix op;
  Domain domain;
  DensityOperator state;
  EigenDecomposition eig;
  double measure = 0;
  int A = 0; ///< ceil(|Omega|) with an integer guard

  int dim() const noexcept { return op.dim(); }
  const std::string &state_label() const noexcept { return state.label(); }
  bool degenerate() const noexcept { return eig.degenerate; }

  /// sum_{k <= A} lambda_k
  double top_sum() const {
    double s = 0;
    for (int k = 0; k < A; ++k)
      s += eig.eigenvalues[k];
    return s;
  }
};

inline constexpr double kIntegerGuard = 1e-9;
inline constexpr double kTieTol = 1e-8;

/// ceil(x) where values within 1e-9 of an integer count as that integer.
inline int guarded_ceil(double x) { return static_cast<int>(std::ceil(x - kIntegerGuard)); }

inline LocalizationResult analyze(const Domain &omega, const DensityOperator &S) {
  OperatorMatrix T = localization_operator(omega, S);
  EigenDecomposition eig = eigh(T);
  const double mu = measure(omega);
  const int N = S.dim();
  const int A = std::clamp(guarded_ceil(mu), 0, N);
  if (A >= 1 && A < N)
    eig.degenerate = std::abs(eig.eigenvalues[A - 1] - eig.eigenvalues[A]) < kTieTol;
  return LocalizationResult{std::move(T), omega, S, std::move(eig), mu, A};
}

/// #{k : lambda_k > 1 - delta}.
inline int plunge_count(const LocalizationResult &r, double delta) {
  if (!(delta > 0 && delta < 1))
    throw BadDelta("delta must lie in (0, 1), got " + std::to_string(delta));
  int c = 0;
  for (double l : r.eig.eigenvalues)
    c += (l > 1 - delta);
  return c;
}

/// w^2 sum_{z in A} sum_{z' in B} S~(z - z').
inline double double_sum(const Domain &a, const Domain &b, const RealGrid &st) {
  const PhaseLattice &lat = st.lattice();
  const int N = lat.N();
  const auto pa = a.points(), pb = b.points();
  double s = 0;
  for (auto z : pa) {
    double row = 0;
    for (auto zp : pb)
      row += st(wrap_index(z.m - zp.m, N), wrap_index(z.n - zp.n, N));
    s += row;
  }
  return lat.weight() * lat.weight() * s;
}

/// tr((chi_Omega * S)^2) via w^2 sum_{Omega x Omega} S~(z - z').
inline double second_moment(const Domain &omega, const RealGrid &st) {
  return double_sum(omega, omega, st);
}
inline double second_moment(const Domain &omega, const DensityOperator &S) {
  return second_moment(omega, s_tilde(S.matrix()));
}

struct ProjectionFunctional {
  double spectral = 0;       ///< sum lambda_k - sum lambda_k^2
  double cross_boundary = 0; ///< w^2 sum_{z in Omega, z' not in Omega} S~(z - z')
};

/// Both routes to tr(T) - tr(T^2) for T = chi_Omega * S.
inline ProjectionFunctional projection_functional_routes(const LocalizationResult &r,
                                                         const RealGrid &st) {
  ProjectionFunctional p;
  for (double l : r.eig.eigenvalues)
    p.spectral += l - l * l;
  p.cross_boundary = double_sum(r.domain, r.domain.complement(), st);
  return p;
}

/// tr(T) - tr(T^2), checked against the cross-boundary double sum.
inline double projection_functional(const LocalizationResult &r, const RealGrid &st) {
  const auto p = projection_functional_routes(r, st);
  const double tol = 1e-9 * r.dim();
  if (std::abs(p.spectral - p.cross_boundary) > tol)
    throw ConsistencyFailure("projection functional: spectral " + std::to_string(p.spectral) +
                             " vs cross-boundary " + std::to_string(p.cross_boundary));
  return p.spectral;
}
inline double projection_functional(const LocalizationResult &r) {
  return projection_functional(r, s_tilde(r.state.matrix()));
}

/// E(Omega) = 1 - (sum_{k <= A} lambda_k) / |Omega|.
inline double deficiency(const LocalizationResult &r) {
  if (!(r.measure > 0))
    throw EmptyDomain("deficiency of an empty domain");
  return 1.0 - r.top_sum() / r.measure;
}

/// max{1/delta, 1/(1-delta)} |second_moment - |Omega||, the computable bound
/// on |plunge_count - |Omega||.
inline double plunge_count_bound(const LocalizationResult &r, double delta, double second_mom) {
  if (!(delta > 0 && delta < 1))
    throw BadDelta("delta must lie in (0, 1)");
  return std::max(1 / delta, 1 / (1 - delta)) * std::abs(second_mom - r.measure);
}

} // namespace qha

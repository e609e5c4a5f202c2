#pragma once

// Density operators: positive, unit-trace operators on C^N, and the
// constructors used throughout the toolkit.

#include <qha/convolution.hpp>
#include <qha/eigh.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace qha {

inline constexpr double kDensityTol = 1e-10;

struct DensityReport {
  double hermitian_residual = 0; ///< max |S - S*|
  double min_eigenvalue = 0;
  double trace_residual = 0; ///< |tr S - 1|
  double tol = kDensityTol;

  bool hermitian() const { return hermitian_residual <= tol; }
  bool positive() const { return min_eigenvalue >= -tol; }
  bool unit_trace() const { return trace_residual <= tol; }
  bool accepted() const { return hermitian() && positive() && unit_trace(); }

  std::string describe() const {
    std::string s;
    if (!hermitian())
      s += "not Hermitian (residual " + std::to_string(hermitian_residual) + ") ";
    if (!positive())
      s += "not positive (min eigenvalue " + std::to_string(min_eigenvalue) + ") ";
    if (!unit_trace())
      s += "trace off by " + std::to_string(trace_residual);
    return s.empty() ? "ok" : s;
  }
};

/// Checks Hermiticity, positivity and unit trace. Positivity is measured on
/// the Hermitian part, so a grossly non-Hermitian input still gets a report.
inline DensityReport validate_density(const OperatorMatrix &S, double tol = kDensityTol) {
  DensityReport r;
  r.tol = tol;
  r.hermitian_residual = S.hermitian_residual();
  r.min_eigenvalue = eigh(S.hermitian_part(), tol).eigenvalues.back();
  r.trace_residual = std::abs(S.trace() - 1.0);
  return r;
}

class DensityOperator {
public:
  /// Validates `S` and wraps it; throws NotADensity on failure.
  DensityOperator(OperatorMatrix S, std::string label, double tol = kDensityTol)
      : S_(std::move(S)), label_(std::move(label)) {
    const auto rep = validate_density(S_, tol);
    if (!rep.accepted())
      throw NotADensity(label_ + ": " + rep.describe());
  }

  const OperatorMatrix &matrix() const noexcept { return S_; }
  const std::string &label() const noexcept { return label_; }
  int dim() const noexcept { return S_.dim(); }
  PhaseLattice lattice() const { return PhaseLattice(S_.dim()); }

  bool operator==(const DensityOperator &o) const { return S_ == o.S_; }

private:
  OperatorMatrix S_;
  std::string label_;
};

// ---------------------------------------------------------------------------
// Windows

namespace detail {
inline void normalize(SignalVector &v) {
  const double nv = norm(v);
  if (nv == 0)
    throw ZeroVector("cannot normalise the zero vector");
  for (auto &x : v)
    x /= nv;
}

/// Number of periods J with exp(-pi l^2 (J N - N)^2) far below 1e-14.
inline int periodization_terms(const PhaseLattice &lat) {
  const double l2 = lat.weight();
  // Largest |x| with exp(-pi x^2 l^2) >= 1e-16, in samples.
  const double reach = std::sqrt(16.0 * std::log(10.0) / (std::numbers::pi * l2));
  return 2 + static_cast<int>(std::ceil(reach / lat.N()));
}
} // namespace detail

/// Periodised, sampled Gaussian exp(-pi x^2) at spacing l, unit norm.
inline SignalVector gaussian_window(const PhaseLattice &lat) {
  const int N = lat.N();
  const int J = detail::periodization_terms(lat);
  const double l2 = lat.weight();
  SignalVector g(N);
  for (int t = 0; t < N; ++t) {
    double s = 0;
    for (int j = -J; j <= J; ++j) {
      const double x = t + static_cast<double>(j) * N;
      s += std::exp(-std::numbers::pi * l2 * x * x);
    }
    g[t] = s;
  }
  detail::normalize(g);
  return g;
}

/// The first K Hermite functions h_k(x) ~ H_k(sqrt(2 pi) x) exp(-pi x^2),
/// sampled at spacing l, periodised, and orthonormalised in order.
inline std::vector<SignalVector> hermite_family(const PhaseLattice &lat, int K) {
  const int N = lat.N();
  if (K < 1 || K > N)
    throw BadArgument("hermite family size K=" + std::to_string(K) + " must lie in [1, N=" +
                      std::to_string(N) + "]");
  const int J = detail::periodization_terms(lat) + K; // higher orders decay more slowly
  const double l = lat.unit();
  std::vector<SignalVector> fam(K, SignalVector(N));
  std::vector<double> psi(K);
  for (int t = 0; t < N; ++t)
    for (int j = -J; j <= J; ++j) {
      const double y = std::sqrt(2.0 * std::numbers::pi) * l * (t + static_cast<double>(j) * N);
      // normalised Hermite functions by the three-term recurrence
      psi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * y * y);
      if (K > 1)
        psi[1] = std::sqrt(2.0) * y * psi[0];
      for (int k = 1; k + 1 < K; ++k)
        psi[k + 1] = std::sqrt(2.0 / (k + 1)) * y * psi[k] - std::sqrt(double(k) / (k + 1)) * psi[k - 1];
      for (int k = 0; k < K; ++k)
        fam[k][t] += psi[k];
    }
  // modified Gram-Schmidt, two passes
  for (int k = 0; k < K; ++k) {
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < k; ++i) {
        const cplx c = inner(fam[k], fam[i]);
        for (int t = 0; t < N; ++t)
          fam[k][t] -= c * fam[i][t];
      }
    if (norm(fam[k]) < 1e-8)
      throw BadArgument("hermite family degenerates at order " + std::to_string(k));
    detail::normalize(fam[k]);
  }
  return fam;
}

// ---------------------------------------------------------------------------
// States

/// phi (x) phi for phi renormalised to unit length.
inline DensityOperator rank_one_state(SignalVector phi, std::string label = "rankone") {
  detail::normalize(phi);
  return DensityOperator(OperatorMatrix::outer(phi, phi).hermitian_part(), std::move(label));
}

/// sum_n w_n S_n for non-negative weights summing to one.
inline DensityOperator mixture(const std::vector<DensityOperator> &states,
                               const std::vector<double> &weights,
                               std::string label = "mixture") {
  if (states.empty() || states.size() != weights.size())
    throw BadWeights("need one weight per state");
  double total = 0;
  for (double w : weights) {
    if (!(w >= 0))
      throw BadWeights("negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw BadWeights("weights sum to " + std::to_string(total));
  OperatorMatrix S(states.front().dim());
  for (std::size_t i = 0; i < states.size(); ++i)
    S += weights[i] * states[i].matrix();
  return DensityOperator(std::move(S), std::move(label));
}

/// Truncated thermal state: weights proportional to lambda^k over the
/// first K Hermite functions.
inline DensityOperator thermal_state(const PhaseLattice &lat, double lambda, int K) {
  if (!(lambda > 0) || !(lambda <= 1))
    throw BadArgument("thermal parameter must lie in (0, 1]");
  const auto fam = hermite_family(lat, K);
  std::vector<DensityOperator> parts;
  std::vector<double> weights;
  double total = 0;
  for (int k = 0; k < K; ++k) {
    parts.push_back(rank_one_state(fam[k]));
    weights.push_back(std::pow(lambda, k));
    total += weights.back();
  }
  for (auto &w : weights)
    w /= total;
  return mixture(parts, weights,
                 "thermal:lambda=" + std::to_string(lambda) + ",K=" + std::to_string(K));
}

inline DensityOperator maximally_mixed(const PhaseLattice &lat) {
  return DensityOperator((1.0 / lat.N()) * OperatorMatrix::identity(lat.N()), "maximally-mixed");
}

/// Mixture of `rank` projectors onto normalised complex Gaussian vectors with
/// uniformly drawn (then normalised) weights.
template <class Rng>
DensityOperator random_state(const PhaseLattice &lat, int rank, Rng &rng) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  std::vector<DensityOperator> parts;
  std::vector<double> weights;
  double total = 0;
  for (int r = 0; r < rank; ++r) {
    SignalVector v(lat.N());
    for (auto &x : v)
      x = {gauss(rng), gauss(rng)};
    parts.push_back(rank_one_state(v));
    weights.push_back(unif(rng));
    total += weights.back();
  }
  for (auto &w : weights)
    w /= total;
  return mixture(parts, weights, "random:rank=" + std::to_string(rank));
}

/// f * S for a probability density f on the lattice (f >= 0, w sum f = 1).
inline DensityOperator smoothed_state(const RealGrid &f, const DensityOperator &S) {
  for (double v : f.values())
    if (!(v >= 0))
      throw BadSmoother("smoother takes negative values");
  const double mass = f.integral();
  if (std::abs(mass - 1.0) > 1e-10)
    throw BadSmoother("smoother has mass " + std::to_string(mass));
  return DensityOperator(fun_op_conv(f, S.matrix()).hermitian_part(), "smoothed(" + S.label() + ")",
                         1e-9);
}

/// Unit-mass periodised Gaussian bump exp(-|z|^2 / (2 sigma^2)) on the
/// lattice (sigma in length units), centred at the origin.
inline RealGrid gaussian_smoother(const PhaseLattice &lat, double sigma) {
  if (!(sigma > 0))
    throw BadArgument("smoother width must be positive");
  RealGrid f(lat);
  const LatticePoint origin{0, 0};
  for (int m = 0; m < lat.N(); ++m)
    for (int n = 0; n < lat.N(); ++n) {
      const double r = torus_distance({m, n}, origin, lat);
      f(m, n) = std::exp(-r * r / (2 * sigma * sigma));
    }
  f *= 1.0 / f.integral();
  return f;
}

/// Unit-mass point mass at z0: value 1/w there, 0 elsewhere.
inline RealGrid point_mass(const PhaseLattice &lat, LatticePoint z0) {
  RealGrid f(lat);
  f.at(z0) = 1.0 / lat.weight();
  return f;
}

/// The parity operator (P psi)(t) = psi(-t). Not a density operator.
inline OperatorMatrix parity_operator(const PhaseLattice &lat) {
  const int N = lat.N();
  OperatorMatrix P(N);
  for (int t = 0; t < N; ++t)
    P(t, wrap_index(-t, N)) = 1.0;
  return P;
}

/// ||S||^2_{M*} = w sum_z S~(z) |z|, with |z| the torus distance to the origin.
inline double mstar_norm_sq(const OperatorMatrix &S) {
  const RealGrid st = s_tilde(S);
  const PhaseLattice &lat = st.lattice();
  const LatticePoint origin{0, 0};
  double s = 0;
  for (int m = 0; m < lat.N(); ++m)
    for (int n = 0; n < lat.N(); ++n)
      s += st(m, n) * torus_distance({m, n}, origin, lat);
  return lat.weight() * s;
}
inline double mstar_norm_sq(const DensityOperator &S) { return mstar_norm_sq(S.matrix()); }

/// w sum_z f(z) |z|, the first absolute moment of a phase-space function.
inline double first_moment(const RealGrid &f) {
  const PhaseLattice &lat = f.lattice();
  double s = 0;
  for (int m = 0; m < lat.N(); ++m)
    for (int n = 0; n < lat.N(); ++n)
      s += f(m, n) * torus_distance({m, n}, {0, 0}, lat);
  return lat.weight() * s;
}

} // namespace qha

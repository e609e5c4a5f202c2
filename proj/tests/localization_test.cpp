#include <qha/localization.hpp>

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace qha;

namespace {

DensityOperator delta_state(int N) {
  SignalVector d(N);
  d[0] = 1;
  return rank_one_state(d, "delta");
}

std::vector<DensityOperator> states_for(const PhaseLattice &lat, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<DensityOperator> out;
  out.push_back(rank_one_state(gaussian_window(lat), "rankone:gaussian"));
  // sampled Hermite functions are rank-deficient on very small lattices
  out.push_back(thermal_state(lat, 0.5, lat.N() >= 16 ? 4 : 1));
  out.push_back(maximally_mixed(lat));
  out.push_back(random_state(lat, 2, rng));
  return out;
}

Domain disk(const PhaseLattice &lat, double radius_steps, double cx = 0, double cy = 0) {
  return rasterize(ShapeSpec::ball(cx, cy, radius_steps * lat.unit()), 1.0, lat);
}

} // namespace

TEST(LocalizationOperator, FullLatticeGivesIdentity) {
  for (int N : {4, 9, 16}) {
    const PhaseLattice lat(N);
    for (const auto &S : states_for(lat, 50))
      EXPECT_LE(max_abs_diff(localization_operator(Domain::full(lat), S), OperatorMatrix::identity(N)),
                1e-10)
          << S.label();
  }
}

TEST(LocalizationOperator, EmptyDomainGivesZero) {
  const PhaseLattice lat(8);
  EXPECT_EQ(localization_operator(Domain(lat), maximally_mixed(lat)).max_abs(), 0.0);
}

TEST(LocalizationOperator, SinglePointOfDeltaState) {
  const int N = 8;
  const PhaseLattice lat(N);
  const auto S = delta_state(N);
  const LatticePoint z0{3, 5};
  const auto T = localization_operator(Domain(lat, {z0}), S);
  // alpha_z0(delta_0 (x) delta_0) = delta_3 (x) delta_3
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      EXPECT_NEAR(std::abs(T(i, j) - cplx(i == 3 && j == 3 ? 1.0 / N : 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(T.trace().real(), 1.0 / N, 1e-15);
}

TEST(Analyze, FullLatticeAndIntegerGuard) {
  const PhaseLattice lat(8);
  const auto S = rank_one_state(gaussian_window(lat));
  const auto full = analyze(Domain::full(lat), S);
  EXPECT_EQ(full.A, 8);
  for (double l : full.eig.eigenvalues)
    EXPECT_NEAR(l, 1.0, 1e-10);

  std::vector<LatticePoint> pts;
  for (int i = 0; i < 16; ++i)
    pts.push_back({i / 8, i % 8});
  const auto two = analyze(Domain(lat, pts), S);
  EXPECT_DOUBLE_EQ(two.measure, 2.0);
  EXPECT_EQ(two.A, 2);

  EXPECT_EQ(guarded_ceil(2.0 + 5e-10), 2);
  EXPECT_EQ(guarded_ceil(2.0 + 1e-6), 3);
  EXPECT_EQ(analyze(Domain(lat), S).A, 0);
}

TEST(Analyze, DiskShowsPlunge) {
  const int N = 64;
  const PhaseLattice lat(N);
  const auto S = rank_one_state(gaussian_window(lat));
  // 256 points give |Omega| = 4
  std::vector<LatticePoint> pts;
  for (int m = -8; m < 8; ++m)
    for (int n = -8; n < 8; ++n)
      pts.push_back({wrap_index(m, N), wrap_index(n, N)});
  const Domain sq(lat, pts);
  const Domain d = disk(lat, 9.0);
  for (const Domain &omega : {sq, d}) {
    const auto r = analyze(omega, S);
    EXPECT_GT(r.eig.eigenvalues[0], 0.9);
    const int count = plunge_count(r, 0.5);
    EXPECT_LE(std::abs(count - r.measure), perimeter(omega)) << count << " vs " << r.measure;
    EXPECT_LE(std::abs(count - r.measure), plunge_count_bound(r, 0.5, second_moment(omega, S)));
  }
}

TEST(PlungeCount, ExamplesAndErrors) {
  const PhaseLattice lat(8);
  const auto S = thermal_state(lat, 0.5, 3);
  const auto full = analyze(Domain::full(lat), S);
  const auto none = analyze(Domain(lat), S);
  for (double delta : {0.01, 0.5, 0.99}) {
    EXPECT_EQ(plunge_count(full, delta), 8);
    EXPECT_EQ(plunge_count(none, delta), 0);
  }
  EXPECT_THROW(plunge_count(full, 0.0), BadDelta);
  EXPECT_THROW(plunge_count(full, 1.0), BadDelta);
  EXPECT_THROW(plunge_count_bound(full, -0.1, 1.0), BadDelta);
}

TEST(PlungeCount, SecondMomentBoundHolds) {
  const PhaseLattice lat(32);
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> centre(-1.0, 1.0), radius(1.0, 6.0);
  for (const auto &S : states_for(lat, 52)) {
    const auto st = s_tilde(S.matrix());
    for (int trial = 0; trial < 4; ++trial) {
      const Domain omega = disk(lat, radius(rng), centre(rng), centre(rng));
      const auto r = analyze(omega, S);
      const double sm = second_moment(omega, st);
      for (double delta : {0.1, 0.3, 0.5, 0.7, 0.9})
        ASSERT_LE(std::abs(plunge_count(r, delta) - r.measure),
                  plunge_count_bound(r, delta, sm) + 1e-9)
            << S.label() << " delta " << delta;
    }
  }
}

TEST(SecondMoment, MatchesMatrixTrace) {
  std::mt19937_64 rng(53);
  for (int N : {8, 16}) {
    const PhaseLattice lat(N);
    for (const auto &S : states_for(lat, 54)) {
      for (const Domain &omega : {testutil::random_mask(lat, rng, 0.3), disk(lat, N / 5.0)}) {
        const auto T = localization_operator(omega, S);
        EXPECT_NEAR(second_moment(omega, S), (T * T).trace().real(), 1e-9 * N) << S.label();
      }
    }
  }
  const PhaseLattice lat(8);
  EXPECT_NEAR(second_moment(Domain::full(lat), maximally_mixed(lat)), 8.0, 1e-10);
  EXPECT_EQ(second_moment(Domain(lat), maximally_mixed(lat)), 0.0);
}

TEST(ProjectionFunctional, RoutesAgree) {
  std::mt19937_64 rng(55);
  const PhaseLattice lat(16);
  for (const auto &S : states_for(lat, 56)) {
    const auto r = analyze(testutil::random_mask(lat, rng, 0.4), S);
    const auto p = projection_functional_routes(r, s_tilde(S.matrix()));
    EXPECT_NEAR(p.spectral, p.cross_boundary, 1e-9 * 16);
    EXPECT_NO_THROW(projection_functional(r));
  }
  const auto S = maximally_mixed(lat);
  EXPECT_NEAR(projection_functional(analyze(Domain::full(lat), S)), 0.0, 1e-9);
  EXPECT_NEAR(projection_functional(analyze(Domain(lat), S)), 0.0, 1e-12);
}

TEST(ProjectionFunctional, GrowsLinearlyInRadius) {
  const PhaseLattice lat(64);
  const auto S = rank_one_state(gaussian_window(lat));
  const auto st = s_tilde(S.matrix());
  double lo = 1e300, hi = 0;
  for (double steps : {2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0}) {
    const auto r = analyze(disk(lat, steps), S);
    const double ratio = projection_functional(r, st) / (steps * lat.unit());
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi / lo, 2.0) << "[" << lo << ", " << hi << "]";
}

TEST(ProjectionFunctional, DetectsInconsistentInputs) {
  const PhaseLattice lat(8);
  const auto S = rank_one_state(gaussian_window(lat));
  const auto r = analyze(disk(lat, 2.0), S);
  RealGrid wrong = s_tilde(S.matrix());
  wrong *= 2.0;
  EXPECT_THROW(projection_functional(r, wrong), ConsistencyFailure);
}

TEST(Deficiency, Examples) {
  const PhaseLattice lat(8);
  const auto S = rank_one_state(gaussian_window(lat));
  EXPECT_NEAR(deficiency(analyze(Domain::full(lat), S)), 0.0, 1e-10);
  const auto one = analyze(Domain(lat, {{2, 1}}), S);
  EXPECT_EQ(one.A, 1);
  EXPECT_NEAR(deficiency(one), 1.0 - one.eig.eigenvalues[0] * 8, 1e-14);
  EXPECT_THROW(deficiency(analyze(Domain(lat), S)), EmptyDomain);
}

TEST(Deficiency, BoundedByPerimeterOverMeasure) {
  // |Omega| - sum_{k<=A} lambda_k <= |Omega| - tr(T^2) <= ||S||^2 |dOmega|
  const PhaseLattice lat(64);
  const auto S = rank_one_state(gaussian_window(lat));
  const double ms = mstar_norm_sq(S);
  for (double steps = 2.0; steps <= 26.0; steps += 1.0) {
    const Domain omega = disk(lat, steps);
    const double E = deficiency(analyze(omega, S));
    EXPECT_GE(E, -1e-9) << steps;
    EXPECT_LE(E, ms * perimeter(omega) / measure(omega) + 1e-9) << steps;
  }
}

TEST(Deficiency, ShrinksOnGrowingDisks) {
  // The ceiling in A_Omega makes E jitter, so compare maxima over windows of radii.
  const PhaseLattice lat(64);
  const auto S = rank_one_state(gaussian_window(lat));
  std::vector<double> window_max;
  for (int start = 3; start <= 21; start += 6) {
    double hi = 0;
    for (int steps = start; steps < start + 6; ++steps)
      hi = std::max(hi, deficiency(analyze(disk(lat, steps), S)));
    window_max.push_back(hi);
  }
  for (std::size_t i = 1; i < window_max.size(); ++i)
    EXPECT_LT(window_max[i], window_max[i - 1]) << i;
  EXPECT_LT(window_max.back(), window_max.front() / 2);
}

TEST(Invariants, TraceAndEigenvalueRange) {
  std::mt19937_64 rng(57);
  for (int N : {6, 12}) {
    const PhaseLattice lat(N);
    for (const auto &S : states_for(lat, 58))
      for (int trial = 0; trial < 3; ++trial) {
        const auto r = analyze(testutil::random_mask(lat, rng, 0.5), S);
        EXPECT_NEAR(r.op.trace().real(), r.measure, 1e-9 * N);
        double sum = 0;
        for (double l : r.eig.eigenvalues) {
          EXPECT_GE(l, -1e-10);
          EXPECT_LE(l, 1 + 1e-10);
          sum += l;
        }
        EXPECT_NEAR(sum, r.measure, 1e-9 * N);
      }
  }
}

TEST(Invariants, MonotoneInDomain) {
  std::mt19937_64 rng(59);
  const PhaseLattice lat(10);
  for (const auto &S : states_for(lat, 60))
    for (int trial = 0; trial < 3; ++trial) {
      const Domain small = testutil::random_mask(lat, rng, 0.3);
      Domain big = small;
      for (auto z : testutil::random_mask(lat, rng, 0.3).points())
        big.insert(z);
      ASSERT_TRUE(small.is_subset_of(big));
      const auto diff = localization_operator(big, S) - localization_operator(small, S);
      EXPECT_GE(min_eigenvalue(diff.hermitian_part()), -1e-10);
    }
}

TEST(Localization, RejectsMismatchedDimensions) {
  EXPECT_THROW(localization_operator(Domain(PhaseLattice(4)), maximally_mixed(PhaseLattice(5))),
               DimensionMismatch);
}

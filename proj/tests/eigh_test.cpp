#include <qha/eigh.hpp>

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace qha;

namespace {

void expect_invariants(const OperatorMatrix &A, const EigenDecomposition &e) {
  const int N = A.dim();
  ASSERT_EQ(e.dim(), N);
  for (int k = 0; k + 1 < N; ++k)
    EXPECT_GE(e.eigenvalues[k], e.eigenvalues[k + 1]);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      ASSERT_NEAR(std::abs(inner(e.eigenvectors[i], e.eigenvectors[j]) - cplx(i == j ? 1.0 : 0.0)),
                  0.0, 1e-10);
  EXPECT_LE(max_abs_diff(A, e.reconstruct()), 1e-9 * std::max(A.max_abs(), 1e-300));
}

} // namespace

TEST(Eigh, Identity) {
  const auto e = eigh(OperatorMatrix::identity(7));
  for (double l : e.eigenvalues)
    EXPECT_DOUBLE_EQ(l, 1.0);
}

TEST(Eigh, RankOneProjector) {
  std::mt19937_64 rng(11);
  const auto phi = testutil::random_unit_vector(10, rng);
  const auto e = eigh(OperatorMatrix::outer(phi, phi).hermitian_part());
  EXPECT_NEAR(e.eigenvalues[0], 1.0, 1e-12);
  for (int k = 1; k < 10; ++k)
    EXPECT_NEAR(e.eigenvalues[k], 0.0, 1e-12);
  EXPECT_NEAR(std::abs(inner(e.eigenvectors[0], phi)), 1.0, 1e-12);
}

TEST(Eigh, RandomHermitianInvariantsAndTrace) {
  std::mt19937_64 rng(12);
  for (int N : {1, 2, 3, 8, 17, 32}) {
    const auto A = testutil::random_hermitian(N, rng);
    const auto e = eigh(A);
    expect_invariants(A, e);
    double s = 0;
    for (double l : e.eigenvalues)
      s += l;
    EXPECT_NEAR(s, A.trace().real(), 1e-10 * N);
  }
}

TEST(Eigh, RecoversKnownSpectrum) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int N : {6, 16, 40}) {
    std::vector<double> values(N);
    for (auto &x : values)
      x = u(rng);
    values[1] = values[0]; // a degenerate pair
    const auto U = testutil::random_unitary(N, rng);
    OperatorMatrix D(N);
    for (int i = 0; i < N; ++i)
      D(i, i) = values[i];
    const auto A = (U * D * U.adjoint()).hermitian_part();
    const auto e = eigh(A);
    std::sort(values.rbegin(), values.rend());
    for (int k = 0; k < N; ++k)
      EXPECT_NEAR(e.eigenvalues[k], values[k], 1e-9 * 3);
    expect_invariants(A, e);
  }
}

TEST(Eigh, DeterministicForFixedInput) {
  std::mt19937_64 rng(14);
  const auto A = testutil::random_hermitian(12, rng);
  const auto a = eigh(A), b = eigh(A);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
  EXPECT_EQ(a.eigenvectors, b.eigenvectors);
}

TEST(Eigh, RejectsNonHermitian) {
  std::mt19937_64 rng(15);
  EXPECT_THROW(eigh(testutil::random_matrix(5, rng)), NotHermitian);
  auto A = testutil::random_hermitian(5, rng);
  A(0, 1) += 1e-9; // within default tolerance
  EXPECT_NO_THROW(eigh(A));
}

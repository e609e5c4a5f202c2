#include <qha/convolution.hpp>
#include <qha/eigh.hpp>

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace qha;
using qha::testutil::random_complex_grid;
using qha::testutil::random_hermitian;
using qha::testutil::random_matrix;
using qha::testutil::random_real_grid;

namespace {

OperatorMatrix random_positive(int N, std::mt19937_64 &rng) {
  const auto A = random_matrix(N, rng);
  OperatorMatrix P = (A * A.adjoint()).hermitian_part();
  P *= 1.0 / P.trace().real();
  return P;
}

} // namespace

TEST(FunOpConv, MatchesReferenceSum) {
  std::mt19937_64 rng(20);
  for (int N : {1, 3, 6}) {
    const PhaseLattice lat(N);
    const auto S = random_matrix(N, rng);
    const auto f = random_complex_grid(lat, rng);
    EXPECT_LE(max_abs_diff(fun_op_conv(f, S), testutil::naive_fun_op_conv(f, S)), 1e-12);
  }
}

TEST(FunOpConv, ConstantOneGivesTraceTimesIdentity) {
  std::mt19937_64 rng(21);
  for (int N : {2, 8, 16}) {
    const PhaseLattice lat(N);
    const auto S = random_matrix(N, rng);
    const auto out = fun_op_conv(RealGrid(lat, 1.0), S);
    EXPECT_LE(max_abs_diff(out, S.trace() * OperatorMatrix::identity(N)), 1e-10);
  }
}

TEST(FunOpConv, SinglePointIsScaledTranslate) {
  std::mt19937_64 rng(22);
  const PhaseLattice lat(8);
  const auto S = random_matrix(8, rng);
  RealGrid f(lat);
  f(3, 6) = 1;
  EXPECT_LE(max_abs_diff(fun_op_conv(f, S), lat.weight() * translate_op(S, {3, 6})), 1e-14);
}

TEST(FunOpConv, TraceScalesWithMass) {
  std::mt19937_64 rng(23);
  const PhaseLattice lat(8);
  const auto S = random_matrix(8, rng);
  const auto f = random_complex_grid(lat, rng);
  EXPECT_NEAR(std::abs(fun_op_conv(f, S).trace() - f.integral() * S.trace()), 0.0, 1e-10);
}

TEST(OpOpConv, MatchesReferenceTrace) {
  std::mt19937_64 rng(24);
  for (int N : {1, 4, 7}) {
    const auto S = random_matrix(N, rng), T = random_matrix(N, rng);
    EXPECT_LE(max_abs_diff(op_op_conv(S, T), testutil::naive_op_op_conv(S, T)), 1e-11);
  }
}

TEST(OpOpConv, RankOneGivesSpectrogram) {
  std::mt19937_64 rng(25);
  const int N = 9;
  const auto psi = testutil::random_vector(N, rng), phi = testutil::random_vector(N, rng);
  const auto V = stft(psi, phi);
  // (psi (x) psi) * (phi_check (x) phi_check) = |V_phi psi|^2
  const auto conv = op_op_conv(OperatorMatrix::outer(psi, psi),
                               parity_conjugate(OperatorMatrix::outer(phi, phi)));
  for (std::size_t i = 0; i < V.size(); ++i)
    ASSERT_NEAR(std::abs(conv[i] - std::norm(V[i])), 0.0, 1e-10);
  // (psi (x) psi) * (psi (x) psi)_check = |V_psi psi|^2
  const auto R = OperatorMatrix::outer(psi, psi);
  const auto auto_conv = op_op_conv(R, parity_conjugate(R));
  const auto W = stft(psi, psi);
  for (std::size_t i = 0; i < W.size(); ++i)
    ASSERT_NEAR(std::abs(auto_conv[i] - std::norm(W[i])), 0.0, 1e-10);
}

TEST(OpOpConv, IntegralIsProductOfTraces) {
  std::mt19937_64 rng(26);
  for (int N : {5, 8, 16}) {
    const auto S = random_matrix(N, rng), T = random_matrix(N, rng);
    EXPECT_NEAR(std::abs(op_op_conv(S, T).integral() - S.trace() * T.trace()), 0.0,
                1e-10 * std::abs(S.trace() * T.trace()) + 1e-10);
  }
}

TEST(OpOpConv, CommutesForHermitian) {
  std::mt19937_64 rng(27);
  const auto S = random_hermitian(8, rng), T = random_hermitian(8, rng);
  EXPECT_LE(max_abs_diff(op_op_conv(S, T), op_op_conv(T, S)), 1e-10);
}

TEST(OpOpConv, BasisSummationGivesTrace) {
  std::mt19937_64 rng(28);
  const int N = 8;
  const PhaseLattice lat(N);
  const auto S = random_positive(N, rng);
  ComplexGrid sum(lat);
  for (int t = 0; t < N; ++t) {
    SignalVector d(N);
    d[t] = 1;
    sum += op_op_conv(S, OperatorMatrix::outer(d, d));
  }
  for (const auto &v : sum.values())
    ASSERT_NEAR(std::abs(v - S.trace()), 0.0, 1e-10);
}

TEST(STilde, RankOneAndMaximallyMixed) {
  std::mt19937_64 rng(29);
  const int N = 10;
  auto phi = testutil::random_unit_vector(N, rng);
  const auto st = s_tilde(OperatorMatrix::outer(phi, phi));
  const auto V = stft(phi, phi);
  for (std::size_t i = 0; i < V.size(); ++i)
    ASSERT_NEAR(st[i], std::norm(V[i]), 1e-12);

  const auto mixed = s_tilde((1.0 / N) * OperatorMatrix::identity(N));
  for (double v : mixed.values())
    ASSERT_NEAR(v, 1.0 / N, 1e-14);
  EXPECT_NEAR(mixed.integral(), 1.0, 1e-12);
}

TEST(STilde, PositiveEvenWithSquaredTraceMass) {
  std::mt19937_64 rng(30);
  for (int N : {6, 11}) {
    const auto S = random_positive(N, rng);
    const auto st = s_tilde(S);
    EXPECT_GE(min_value(st), -1e-12);
    EXPECT_NEAR(st.integral(), std::norm(S.trace()), 1e-10 * std::norm(S.trace()));
    EXPECT_LE(max_abs_diff(st, st.reflected()), 1e-10 * max_abs(st));
  }
}

TEST(FunFunConv, UnitImpulseAndMass) {
  std::mt19937_64 rng(31);
  const PhaseLattice lat(7);
  const auto f = random_real_grid(lat, rng), g = random_real_grid(lat, rng);
  RealGrid delta(lat);
  delta(0, 0) = 1 / lat.weight();
  EXPECT_LE(max_abs_diff(fun_fun_conv(f, delta), f), 1e-14);
  EXPECT_NEAR(fun_fun_conv(f, g).integral(), f.integral() * g.integral(), 1e-12);
  EXPECT_LE(max_abs_diff(fun_fun_conv(f, g), fun_fun_conv(g, f)), 1e-13);
}

TEST(Associativity, FunctionFunctionOperator) {
  std::mt19937_64 rng(32);
  const PhaseLattice lat(8);
  const auto f = random_complex_grid(lat, rng), g = random_complex_grid(lat, rng);
  const auto S = random_matrix(8, rng);
  EXPECT_LE(max_abs_diff(fun_op_conv(fun_fun_conv(f, g), S), fun_op_conv(f, fun_op_conv(g, S))),
            1e-9);
}

TEST(Associativity, FunctionOperatorOperator) {
  std::mt19937_64 rng(33);
  const PhaseLattice lat(8);
  const auto f = random_complex_grid(lat, rng);
  const auto S = random_matrix(8, rng), T = random_matrix(8, rng);
  EXPECT_LE(max_abs_diff(op_op_conv(fun_op_conv(f, S), T), fun_fun_conv(f, op_op_conv(S, T))),
            1e-9);
}

TEST(Positivity, PreservedByBothConvolutions) {
  std::mt19937_64 rng(34);
  const PhaseLattice lat(8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_real_grid(lat, rng, 0, 1);
    const auto S = random_positive(8, rng), T = random_positive(8, rng);
    EXPECT_GE(min_eigenvalue(fun_op_conv(f, S).hermitian_part()), -1e-10);
    EXPECT_GE(min_value(real_part(op_op_conv(S, T))), -1e-12);
  }
}

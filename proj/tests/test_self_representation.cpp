#include <doctest.h>

#include <cmath>

#include "psd/self_representation.hpp"
#include "test_util.hpp"

using namespace psd;
using testutil::lambda_on_multiples;
using testutil::naive_apply_R;
using testutil::periodic_signal;
using testutil::random_vector;

TEST_CASE("build_S matches the Toeplitz definition") {
  VectorXd l(4);
  l << 0, 1, 0, 0;
  const MatrixXd S = build_S(l);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(S(i, j) == (std::abs(i - j) == 1 ? 1.0 : 0.0));

  CHECK(build_S(VectorXd::Zero(5)).isZero(0.0));

  VectorXd l3(3);
  l3 << 0.5, 0.2, 0.1;
  MatrixXd expected(3, 3);
  expected << 0.5, 0.2, 0.1, 0.2, 0.5, 0.2, 0.1, 0.2, 0.5;
  CHECK(build_S(l3).isApprox(expected, 0.0));
}

TEST_CASE("build_S/W reject too-short vectors") {
  CHECK_THROWS_AS(build_S(VectorXd::Ones(1)), DimensionError);
}

TEST_CASE("Toeplitz symmetry holds for random lambda") {
  auto g = testutil::rng(11);
  const VectorXd l = random_vector(g, 17);
  const MatrixXd S = build_S(l);
  for (int i = 0; i < 17; ++i)
    for (int j = 0; j < 17; ++j) {
      CHECK(S(i, j) == S(j, i));
      CHECK(S(i, j) == l(std::abs(i - j)));
    }
}

TEST_CASE("build_W inverts the Toeplitz row abs-sums") {
  VectorXd l(4);
  l << 0, 1, 0, 0;
  bool degen = true;
  const VectorXd w = build_W_diagonal(l, &degen);
  CHECK_FALSE(degen);
  CHECK(w(0) == doctest::Approx(1.0));
  CHECK(w(1) == doctest::Approx(0.5));
  CHECK(w(2) == doctest::Approx(0.5));
  CHECK(w(3) == doctest::Approx(1.0));

  // Single unit weight at lag 0 -> every row sums to 1 -> W is the identity.
  VectorXd e0 = VectorXd::Zero(6);
  e0(0) = 1.0;
  CHECK(build_W_diagonal(e0).isApprox(VectorXd::Ones(6), 0.0));

  // All-zero lambda hits the epsilon floor and flags degeneracy.
  const VectorXd wz = build_W_diagonal(VectorXd::Zero(6), &degen);
  CHECK(degen);
  CHECK(wz(0) == doctest::Approx(1e12));
}

TEST_CASE("row abs-sums agree with a naive double loop") {
  auto g = testutil::rng(12);
  const VectorXd l = random_vector(g, 33);
  const VectorXd s = toeplitz_row_abs_sums(l);
  for (int i = 0; i < 33; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 33; ++j) acc += std::abs(l(std::abs(i - j)));
    CHECK(s(i) == doctest::Approx(acc).epsilon(1e-12));
  }
}

TEST_CASE("lag_correlation agrees with the pairwise definition") {
  auto g = testutil::rng(13);
  const VectorXd u = random_vector(g, 21);
  const VectorXd z = random_vector(g, 21);
  const VectorXd c = lag_correlation(u, z);
  for (int l = 0; l < 21; ++l) {
    double acc = 0.0;
    for (int i = 0; i < 21; ++i)
      for (int j = 0; j < 21; ++j)
        if (std::abs(i - j) == l) acc += u(i) * z(j);
    CHECK(c(l) == doctest::Approx(acc).epsilon(1e-12));
  }
}

TEST_CASE("apply_R_1d reproduces constants and in-phase averages") {
  auto g = testutil::rng(14);

  // Constant signal: rows of R sum to one, so the constant is reproduced.
  VectorXd lpos = random_vector(g, 8, 0.0, 1.0);
  lpos(3) += 0.5;  // keep every row sum safely nonzero
  const VectorXd c = VectorXd::Constant(8, 0.37);
  CHECK(apply_R_1d({lpos, 0}, c).isApprox(c, 1e-12));

  // Period-2 signal, lambda supported on lags 2 and 4.
  VectorXd y(6);
  y << 1, 2, 1, 2, 1, 2;
  VectorXd l = VectorXd::Zero(6);
  l(2) = 0.7;
  l(4) = 0.3;
  CHECK(apply_R_1d({l, 1}, y).isApprox(y, 1e-12));
  CHECK(residual_1d({l, 1}, y).value == doctest::Approx(0.0).epsilon(1e-14));

  // Unit weight at lag 1 averages the neighbors.
  VectorXd y2(4);
  y2 << 0, 1, 0, 1;
  VectorXd e1 = VectorXd::Zero(4);
  e1(1) = 1.0;
  VectorXd expected(4);
  expected << 1, 0, 1, 0;
  CHECK(apply_R_1d({e1, 1}, y2).isApprox(expected, 1e-12));
}

TEST_CASE("row-stochasticity for nonnegative lambda") {
  auto g = testutil::rng(15);
  for (int rep = 0; rep < 5; ++rep) {
    VectorXd l = random_vector(g, 24, 0.0, 1.0);
    l.head(3).setZero();
    l.tail(3).setZero();
    const SelfRepOperator op = build_operator(l);
    const VectorXd sums = op.dense_R().rowwise().sum();
    for (int i = 0; i < 24; ++i) CHECK(sums(i) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("exact self-representation on periodic signals") {
  auto g = testutil::rng(16);
  for (int rep = 0; rep < 20; ++rep) {
    const int T = 2 + static_cast<int>(testutil::uniform(g, 0, 1) * 14);
    const int reps = 2 + static_cast<int>(testutil::uniform(g, 0, 1) * 4);
    const int n = T * reps;
    const VectorXd y = periodic_signal(g, n, T);
    const int p = std::min(T, 4);
    VectorXd l = lambda_on_multiples(g, n, T, p);
    REQUIRE(l.cwiseAbs().maxCoeff() > 0);
    const Residual r = residual_1d({l, p}, y);
    CHECK_FALSE(r.degenerate);
    const VectorXd diff = y - apply_R_1d({l, p}, y);
    CHECK(diff.lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("residual_1d flags all-zero lambda and matches the naive oracle") {
  auto g = testutil::rng(17);
  const VectorXd y = random_vector(g, 16);
  CHECK(residual_1d({VectorXd::Zero(16), 2}, y).degenerate);

  for (int rep = 0; rep < 5; ++rep) {
    const VectorXd l = random_vector(g, 16);
    const VectorXd ref = y - naive_apply_R(l, y);
    CHECK(residual_1d({l, 0}, y).value ==
          doctest::Approx(ref.squaredNorm()).epsilon(1e-10));
  }
}

TEST_CASE("apply_R_2d equals row-direction then column-direction application") {
  auto g = testutil::rng(18);
  const int n = 12;
  const MatrixXd Y = testutil::random_matrix(g, n, n, 0.0, 1.0);
  const VectorXd l1 = random_vector(g, n);
  const VectorXd l2 = random_vector(g, n);

  const MatrixXd out = apply_R_2d({l1, 0}, {l2, 0}, Y);

  // Two-pass oracle: apply lambda2 along every row, then lambda1 down every
  // column of the intermediate.
  MatrixXd step1(n, n);
  for (int j = 0; j < n; ++j)
    step1.row(j) = naive_apply_R(l2, Y.row(j).transpose()).transpose();
  MatrixXd step2(n, n);
  for (int j = 0; j < n; ++j) step2.col(j) = naive_apply_R(l1, step1.col(j));

  CHECK((out - step2).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("apply_R_2d reproduces constants and separable periodic images") {
  auto g = testutil::rng(19);
  const int n = 24;

  VectorXd lpos = random_vector(g, n, 0.1, 1.0);
  const MatrixXd C = MatrixXd::Constant(n, n, 0.5);
  CHECK(apply_R_2d({lpos, 0}, {lpos, 0}, C).isApprox(C, 1e-12));

  // sin/cos style separable background with integer periods.
  const int T1 = 6, T2 = 8;
  MatrixXd Y(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      Y(i, j) = (std::sin(2 * M_PI * (i % T1) / T1) +
                 std::cos(2 * M_PI * (j % T2) / T2) + 2.0) /
                4.0;
  const VectorXd l1 = lambda_on_multiples(g, n, T1, 4);
  const VectorXd l2 = lambda_on_multiples(g, n, T2, 4);
  const MatrixXd out = apply_R_2d({l1, 4}, {l2, 4}, Y);
  CHECK((out - Y).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("guard bookkeeping on the pattern vector") {
  PeriodicPatternVector l(VectorXd::Ones(10), 3);
  CHECK_FALSE(l.guard_consistent());
  l.apply_guard();
  CHECK(l.guard_consistent());
  CHECK(l.values.head(3).isZero(0.0));
  CHECK(l.values.tail(3).isZero(0.0));
  CHECK(l.values(4) == 1.0);
}

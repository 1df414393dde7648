#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <stratwave/eigensolve.hpp>

using namespace stratwave;
using Eigen::MatrixXd;

TEST(SolveGen, DiagonalIsSorted) {
  MatrixXd A = Eigen::Vector3d(3, 1, 2).asDiagonal();
  const auto r = solve_gen<double>(A, MatrixXd::Identity(3, 3));
  EXPECT_NEAR(r.eigenvalues[0], 1.0, 1e-14);
  EXPECT_NEAR(r.eigenvalues[1], 2.0, 1e-14);
  EXPECT_NEAR(r.eigenvalues[2], 3.0, 1e-14);
  EXPECT_EQ(r.negative_count, 0);
}

TEST(SolveGen, DirichletLaplacianClosedForm) {
  const int n = 40;
  const double h = 1.0 / (n + 1);
  MatrixXd A = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = 2.0 / (h * h);
    if (i + 1 < n) A(i, i + 1) = A(i + 1, i) = -1.0 / (h * h);
  }
  const auto r = solve_gen<double>(A, MatrixXd::Identity(n, n));
  for (int j = 1; j <= n; ++j) {
    const double exact = 4.0 * std::pow(std::sin(j * pi * h / 2.0), 2) / (h * h);
    EXPECT_NEAR(r.eigenvalues[j - 1], exact, 1e-10 * exact);
  }
}

TEST(SolveGen, ResidualsAndOrthonormality) {
  std::mt19937 rng(7);
  std::normal_distribution<double> N;
  const int n = 30;
  MatrixXd X(n, n), Y(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      X(i, j) = N(rng);
      Y(i, j) = N(rng);
    }
  const MatrixXd A = X + X.transpose();
  const MatrixXd B = Y * Y.transpose() + n * MatrixXd::Identity(n, n);
  const auto r = solve_gen<double>(A, B, 10);
  EXPECT_EQ(r.size(), 10);
  EXPECT_LE(r.orthonormality_error, 1e-10);
  for (int j = 0; j < 10; ++j) EXPECT_LE(r.residuals[j], 1e-8 * r.norm_A);
  for (int j = 1; j < 10; ++j) EXPECT_LE(r.eigenvalues[j - 1], r.eigenvalues[j]);
}

TEST(SolveGen, CongruenceScalingInvariance) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.5, 2.0);
  const int n = 12;
  MatrixXd A = MatrixXd::Random(n, n);
  A = (A + A.transpose()).eval();
  const MatrixXd B = MatrixXd::Identity(n, n) * 2.0;
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) c[i] = U(rng);
  const MatrixXd As = c.asDiagonal() * A * c.asDiagonal(), Bs = c.asDiagonal() * B * c.asDiagonal();
  const auto r1 = solve_gen<double>(A, B), r2 = solve_gen<double>(As, Bs);
  for (int j = 0; j < n; ++j) EXPECT_NEAR(r1.eigenvalues[j], r2.eigenvalues[j], 1e-10);
}

TEST(SolveGen, HermitianComplex) {
  using MatrixXc = Eigen::MatrixXcd;
  MatrixXc A(2, 2);
  A << 2.0, std::complex<double>(0, 1), std::complex<double>(0, -1), 2.0;
  const auto r = solve_gen<std::complex<double>>(A, MatrixXc::Identity(2, 2));
  EXPECT_NEAR(r.eigenvalues[0], 1.0, 1e-14);
  EXPECT_NEAR(r.eigenvalues[1], 3.0, 1e-14);
}

TEST(SolveGen, IndefiniteMassNamesPivot) {
  MatrixXd B = MatrixXd::Identity(3, 3);
  B(2, 2) = -1.0;
  try {
    solve_gen<double>(MatrixXd::Identity(3, 3), B);
    FAIL() << "expected a failure";
  } catch (const SolveFailure &e) {
    EXPECT_NE(std::string(e.what()).find("pivot 2"), std::string::npos);
  }
}

TEST(SolveGen, NegativeCountAndZeroFlags) {
  MatrixXd A = Eigen::Vector4d(-2, -1e-9, 1e-9, 5).asDiagonal();
  const auto r = solve_gen<double>(A, MatrixXd::Identity(4, 4));
  EXPECT_EQ(r.negative_count, 1);
  EXPECT_TRUE(r.zero_flags[1]);
  EXPECT_TRUE(r.zero_flags[2]);
  EXPECT_FALSE(r.zero_flags[3]);
  const auto half = solve_gen<double>(A, MatrixXd::Identity(4, 4), -1, 0.5e-6);
  EXPECT_EQ(half.negative_count, r.negative_count);
}

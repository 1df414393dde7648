#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"

namespace stratwave {

inline constexpr double default_tol_zero = 1e-6;

template <typename Scalar>
struct EigenResult {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Eigen::VectorXd eigenvalues; // nondecreasing
  Matrix eigenvectors;         // B-orthonormal columns
  Eigen::VectorXd residuals;   // |A x - lambda B x| / |x|
  double tol_zero = default_tol_zero;
  int negative_count = 0;
  std::vector<bool> zero_flags;
  double orthonormality_error = 0.0; // max |X^H B X - I|
  double norm_A = 0.0;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  int count_below(double tol) const {
    return static_cast<int>(std::count_if(eigenvalues.begin(), eigenvalues.end(), [&](double l) { return l < -tol; }));
  }
};

namespace detail {

// index and value of the first non-positive pivot of a plain Cholesky factorization, or -1
template <typename Matrix>
std::pair<int, double> failing_pivot(const Matrix &B) {
  Matrix L = B;
  const int n = static_cast<int>(B.rows());
  for (int k = 0; k < n; ++k) {
    const double pivot = std::real(L(k, k));
    if (!(pivot > 0.0)) return {k, pivot};
    const double s = std::sqrt(pivot);
    L(k, k) = s;
    for (int i = k + 1; i < n; ++i) L(i, k) /= s;
    for (int j = k + 1; j < n; ++j)
      for (int i = j; i < n; ++i) L(i, j) -= L(i, k) * Eigen::numext::conj(L(j, k));
  }
  return {-1, 0.0};
}

} // namespace detail

// Lowest k eigenpairs (all if k < 0) of A x = lambda B x with A self-adjoint, B positive definite.
template <typename Scalar>
EigenResult<Scalar> solve_gen(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> &A,
                              const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> &B, int k = -1,
                              double tol_zero = default_tol_zero, bool vectors = true) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || B.rows() != n || B.cols() != n) throw InvalidInput("solve_gen: dimension mismatch");
  EigenResult<Scalar> r;
  r.tol_zero = tol_zero;
  if (n == 0) return r;
  Eigen::LLT<Matrix> llt(B);
  if (llt.info() != Eigen::Success) {
    const auto [idx, val] = detail::failing_pivot(B);
    throw SolveFailure("B is not positive definite: pivot " + std::to_string(idx) + " = " + std::to_string(val), val);
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(A, B, (vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly) | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw SolveFailure("generalized eigensolver did not converge", 0.0);
  const int m = k < 0 ? n : std::min(k, n);
  r.eigenvalues = es.eigenvalues().head(m);
  r.norm_A = A.norm();
  r.negative_count = r.count_below(tol_zero);
  r.zero_flags.resize(m);
  for (int j = 0; j < m; ++j) r.zero_flags[j] = std::abs(r.eigenvalues[j]) <= tol_zero;
  if (!vectors) return r;
  r.eigenvectors = es.eigenvectors().leftCols(m);
  r.residuals.resize(m);
  for (int j = 0; j < m; ++j) {
    const auto x = r.eigenvectors.col(j);
    r.residuals[j] = (A * x - r.eigenvalues[j] * (B * x)).norm() / x.norm();
  }
  const Matrix G = r.eigenvectors.adjoint() * B * r.eigenvectors;
  r.orthonormality_error = (G - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
  return r;
}

} // namespace stratwave

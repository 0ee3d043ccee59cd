#pragma once

// Dense kernels: discrete algebraic Riccati and Lyapunov solvers, spectral
// radius, and a few symmetric-matrix helpers used throughout the library.

#include <Eigen/Dense>

#include <complex>

namespace ssgc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Filtering-form DARE
///   P = A P A' + Q - (A P C' + S)(C P C' + R)^{-1}(C P A' + S')
/// for a state dimension m and observation dimension n.
struct DareProblem {
  Matrix A;  // m x m
  Matrix C;  // n x m
  Matrix Q;  // m x m
  Matrix R;  // n x n
  Matrix S;  // m x n
};

struct DareSolution {
  Matrix P;      // stabilizing solution
  Matrix K;      // (A P C' + S) Sigma^{-1}
  Matrix Sigma;  // C P C' + R
  double residual_norm = 0.0;
  int iterations = 0;
  bool used_fallback = false;  // doubling gave up; fixed-point recursion finished the job
};

struct DareOptions {
  double tol = 1e-12;  // relative to a bound on the Riccati terms at P, plus 1
  int max_iter = 200;
  int max_fixed_point_iter = 100000;
  // When false the caller takes responsibility for checking rho(A - K C) < 1.
  bool require_stabilizing = true;
};

/// Stabilizing solution by structured doubling, falling back to the plain
/// Riccati recursion when an intermediate inverse is ill-conditioned.
DareSolution solve_dare(const DareProblem& problem, const DareOptions& options = {});

/// Frobenius norm of the DARE residual at P.
double dare_residual(const DareProblem& problem, const Matrix& P);

/// Omega with Omega = A Omega A' + W, by doubling.
Matrix solve_dlyap(const Matrix& A, const Matrix& W, double tol = 1e-14);

/// max |lambda_i(A)|; 0 for an empty matrix.
double spectral_radius(const Matrix& A);

Matrix symmetrize(const Matrix& X);

/// Smallest eigenvalue of the symmetric part of X.
double min_eigenvalue(const Matrix& X);

/// ln det of a symmetric positive-definite matrix by Cholesky. Throws
/// SingularInnovations when X is not numerically positive-definite.
double logdet_spd(const Matrix& X);

/// ln det of a Hermitian positive-definite complex matrix.
double logdet_hpd(const CMatrix& X);

/// Symmetric square root and inverse square root of an SPD matrix.
Matrix sqrtm_spd(const Matrix& X);
Matrix inv_sqrtm_spd(const Matrix& X);

}  // namespace ssgc

#pragma once

// Independent reference computations for tests. Nothing here calls the
// solver paths it is used to check.

#include "ssgc/gc.hpp"
#include "ssgc/numkern.hpp"
#include "ssgc/ssm.hpp"

#include <cmath>
#include <complex>
#include <random>

namespace oracle {

using ssgc::Matrix;

/// Plain Riccati recursion from P0 = Q until successive change < tol.
inline Matrix riccati_fixed_point(const ssgc::DareProblem& p, double tol = 1e-14,
                                  int max_iter = 1000000) {
  Matrix P = p.Q;
  for (int k = 0; k < max_iter; ++k) {
    const Matrix G = p.A * P * p.C.transpose() + p.S;
    const Matrix V = p.C * P * p.C.transpose() + p.R;
    Matrix next = p.A * P * p.A.transpose() + p.Q - G * V.inverse() * G.transpose();
    next = 0.5 * (next + next.transpose());
    const double change = (next - P).norm();
    P = next;
    if (change < tol) break;
  }
  return P;
}

/// sum_{k=0..N} A^k W A'^k with N chosen so that ||A^N|| < 1e-14.
inline Matrix lyapunov_series(const Matrix& A, const Matrix& W) {
  Matrix sum = W;
  Matrix Ak = A;
  for (int k = 1; k < 1000000 && Ak.norm() >= 1e-14; ++k) {
    sum += Ak * W * Ak.transpose();
    Ak = Ak * A;
  }
  return sum;
}

inline Matrix random_matrix(std::mt19937_64& gen, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> nd;
  Matrix M(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) M(i, k) = nd(gen);
  return M;
}

inline double eig_radius(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::ComplexEigenSolver<Matrix> es(A);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Random square matrix with spectral radius exactly `rho`.
inline Matrix random_stable(std::mt19937_64& gen, Eigen::Index m, double rho) {
  Matrix A = random_matrix(gen, m, m);
  const double r = eig_radius(A);
  return r > 0 ? Matrix(A * (rho / r)) : A;
}

inline Matrix random_spd(std::mt19937_64& gen, Eigen::Index n, double delta = 0.1) {
  const Matrix G = random_matrix(gen, n, n);
  return G.transpose() * G + delta * Matrix::Identity(n, n);
}

/// Random stable, minimum-phase innovations model with radii below the caps.
inline ssgc::StateSpaceInnovations random_innovations(std::mt19937_64& gen, Eigen::Index m,
                                                      Eigen::Index n, double rho = 0.9,
                                                      double rho_mp = 0.9) {
  std::uniform_real_distribution<double> ud(0.3, rho);
  for (;;) {
    ssgc::StateSpaceInnovations s;
    s.A = random_stable(gen, m, ud(gen));
    s.C = random_matrix(gen, n, m);
    s.K = random_matrix(gen, m, n) / std::sqrt(static_cast<double>(m + n));
    s.Sigma = random_spd(gen, n);
    for (int shrink = 0; shrink < 50 && eig_radius(s.A - s.K * s.C) >= rho_mp; ++shrink) s.K *= 0.8;
    if (eig_radius(s.A - s.K * s.C) < rho_mp) return s;
  }
}

/// Trivariate model (target 0, source 1, conditioning 2) whose closed-loop
/// matrix B = A - K C never carries the source innovation into the target
/// channel when `causal` is false: states split (a, b), B_ab = 0, K_source
/// lives in b and C_target reads only a. With `causal` the B_ab block is
/// filled in.
inline ssgc::StateSpaceInnovations block_triangular_model(std::mt19937_64& gen, bool causal) {
  std::uniform_int_distribution<int> dim(1, 3);
  for (;;) {
    const Eigen::Index ma = dim(gen), mb = dim(gen), m = ma + mb;
    Matrix B = random_matrix(gen, m, m);
    B.block(0, ma, ma, mb).setZero();
    if (causal) B.block(0, ma, ma, mb) = random_matrix(gen, ma, mb);
    const double rb = eig_radius(B);
    if (rb > 0) B *= 0.7 / rb;
    Matrix K = 0.5 * random_matrix(gen, m, 3);
    K.block(0, 1, ma, 1).setZero();
    Matrix C = random_matrix(gen, 3, m);
    C.block(0, ma, 1, mb).setZero();
    const Matrix A = B + K * C;
    if (eig_radius(A) >= 0.95) continue;
    return {A, C, K, random_spd(gen, 3)};
  }
}

/// Grid mean of ln|det F(z)|^2 for the normalized target factor
/// F = [B^r H]_{1,1} + [B^r H]_{1,o} Sigma_{o1} Sigma_11^{-1}. F(0) = I, so by
/// Jensen's formula this is zero exactly when F has no zeros in the unit disk
/// and positive otherwise; the spectral GC grid mean falls short of the
/// time-domain value by this amount.
inline double normalized_factor_defect(const ssgc::StateSpaceInnovations& s,
                                       const ssgc::Partition& p, std::size_t N = 4096) {
  const auto red = ssgc::reduce(s, p);
  const auto r = p.reduced();
  const auto o = p.others();
  const auto n1 = static_cast<Eigen::Index>(p.target.size());
  const Matrix L = s.Sigma(o, p.target) * s.Sigma(p.target, p.target).inverse();
  const auto grid = ssgc::frequency_grid(N);
  double sum = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    const auto z = std::polar(1.0, -grid[j]);
    const ssgc::CMatrix H = ssgc::transfer_at(s.A, s.C, s.K, z);
    const ssgc::CMatrix Br = ssgc::inverse_transfer_at(red.A, red.Cr, red.Kr, z);
    const ssgc::CMatrix M = Br.topRows(n1) * H(r, Eigen::all);
    const ssgc::CMatrix F = M(Eigen::all, p.target) + M(Eigen::all, o) * L.cast<std::complex<double>>();
    const double w = (j == 0 || j + 1 == N) ? 0.5 : 1.0;
    sum += w * std::log(std::norm(F.determinant()));
  }
  return sum / static_cast<double>(N - 1);
}

/// Simulated observations (rows are time) from an innovations model.
inline Matrix simulate_innovations(const ssgc::StateSpaceInnovations& s, Eigen::Index T,
                                   std::uint64_t seed, Eigen::Index burn = 2000) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  const Eigen::LLT<Matrix> llt(s.Sigma);
  const Matrix L = llt.matrixL();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(s.m());
  Matrix Y(T, s.n());
  Eigen::VectorXd w(s.n());
  for (Eigen::Index t = -burn; t < T; ++t) {
    for (Eigen::Index i = 0; i < s.n(); ++i) w(i) = nd(gen);
    const Eigen::VectorXd e = L * w;
    const Eigen::VectorXd y = s.C * z + e;
    z = s.A * z + s.K * e;
    if (t >= 0) Y.row(t) = y.transpose();
  }
  return Y;
}

/// Sample autocovariance E[y_t y_{t-k}'] with mean removal.
inline Matrix sample_autocov(const Matrix& Y, Eigen::Index k) {
  const Matrix Z = Y.rowwise() - Y.colwise().mean();
  const auto T = Z.rows();
  return Z.bottomRows(T - k).transpose() * Z.topRows(T - k) / static_cast<double>(T);
}

/// Closed-form transfer function of the bivariate AR(1) [[a, c], [0, b]].
inline Eigen::MatrixXcd minimal_var_transfer(double a, double b, double c, std::complex<double> z) {
  Eigen::MatrixXcd H(2, 2);
  H << 1.0 / (1.0 - a * z), c * z / ((1.0 - a * z) * (1.0 - b * z)), 0.0, 1.0 / (1.0 - b * z);
  return H;
}

}  // namespace oracle

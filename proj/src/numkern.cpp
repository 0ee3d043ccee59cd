#include "ssgc/numkern.hpp"

#include "ssgc/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>

namespace ssgc {

namespace {

bool all_finite(const Matrix& X) { return X.allFinite(); }

void validate_dare(const DareProblem& p) {
  const auto m = p.A.rows();
  const auto n = p.C.rows();
  if (p.A.cols() != m || p.C.cols() != m || p.Q.rows() != m || p.Q.cols() != m ||
      p.R.rows() != n || p.R.cols() != n || p.S.rows() != m || p.S.cols() != n) {
    throw Error(ErrorCode::InvalidProblem, "DARE dimensions inconsistent");
  }
  if (n == 0) throw Error(ErrorCode::InvalidProblem, "empty observation");
  if (!all_finite(p.A) || !all_finite(p.C) || !all_finite(p.Q) || !all_finite(p.R) ||
      !all_finite(p.S)) {
    throw Error(ErrorCode::InvalidProblem, "non-finite DARE coefficients");
  }
  const double scale = 1.0 + p.Q.norm() + p.R.norm() + p.S.norm();
  if ((p.Q - p.Q.transpose()).norm() > 1e-10 * scale ||
      (p.R - p.R.transpose()).norm() > 1e-10 * scale) {
    throw Error(ErrorCode::InvalidProblem, "Q or R not symmetric");
  }
  Eigen::LLT<Matrix> llt(symmetrize(p.R));
  if (llt.info() != Eigen::Success || min_eigenvalue(p.R) <= 0.0) {
    throw Error(ErrorCode::InvalidProblem, "R not positive-definite");
  }
  Matrix joint(m + n, m + n);
  joint << p.Q, p.S, p.S.transpose(), p.R;
  if (min_eigenvalue(joint) < -1e-10 * scale) {
    throw Error(ErrorCode::InvalidProblem, "noise covariance not positive-semidefinite");
  }
  if (m > 0 && spectral_radius(p.A) >= 1.0) {
    throw Error(ErrorCode::InvalidProblem, "A is not stable");
  }
}

// One step of the Riccati recursion.
Matrix riccati_step(const DareProblem& p, const Matrix& P) {
  const Matrix APCS = p.A * P * p.C.transpose() + p.S;
  const Matrix V = symmetrize(p.C * P * p.C.transpose() + p.R);
  Eigen::LDLT<Matrix> ldlt(V);
  return symmetrize(p.A * P * p.A.transpose() + p.Q - APCS * ldlt.solve(APCS.transpose()));
}

struct DoublingResult {
  Matrix P;
  int iterations = 0;
  bool ok = false;
};

// Structured doubling on the equivalent cross-term-free equation
//   P = At P At' - At P C'(C P C' + R)^{-1} C P At' + Qt,
//   At = A - S R^{-1} C,  Qt = Q - S R^{-1} S'.
DoublingResult structured_doubling(const DareProblem& p, int max_iter) {
  const auto m = p.A.rows();
  Eigen::LLT<Matrix> rllt(symmetrize(p.R));
  const Matrix RinvC = rllt.solve(p.C);
  const Matrix RinvSt = rllt.solve(p.S.transpose());

  Matrix Ak = (p.A - p.S * RinvC).transpose();
  Matrix Gk = symmetrize(p.C.transpose() * RinvC);
  Matrix Hk = symmetrize(p.Q - p.S * RinvSt);
  const Matrix I = Matrix::Identity(m, m);

  DoublingResult out;
  for (int k = 0; k < max_iter; ++k) {
    Eigen::PartialPivLU<Matrix> lu(I + Gk * Hk);
    if (!(lu.rcond() > 1e-12)) return out;
    const Matrix WA = lu.solve(Ak);
    const Matrix WG = lu.solve(Gk);
    const Matrix Hnext = symmetrize(Hk + Ak.transpose() * Hk * WA);
    const Matrix Gnext = symmetrize(Gk + Ak * WG * Ak.transpose());
    const Matrix Anext = Ak * WA;
    if (!Hnext.allFinite() || !Gnext.allFinite() || !Anext.allFinite()) return out;
    const double change = (Hnext - Hk).norm();
    Hk = Hnext;
    Gk = Gnext;
    Ak = Anext;
    out.iterations = k + 1;
    if (change <= 1e-15 * (Hk.norm() + 1.0) || Ak.norm() < 1e-300) {
      out.P = Hk;
      out.ok = true;
      return out;
    }
  }
  return out;
}

}  // namespace

Matrix symmetrize(const Matrix& X) { return 0.5 * (X + X.transpose()); }

double min_eigenvalue(const Matrix& X) {
  if (X.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(X), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "symmetric eigensolver");
  return es.eigenvalues().minCoeff();
}

double spectral_radius(const Matrix& A) {
  if (A.rows() != A.cols()) throw Error(ErrorCode::DimensionMismatch, "spectral_radius of non-square matrix");
  if (A.size() == 0) return 0.0;
  if (!A.allFinite()) throw Error(ErrorCode::EigenFailure, "non-finite matrix");
  Eigen::EigenSolver<Matrix> es(A, false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "QR iteration did not converge");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double logdet_spd(const Matrix& X) {
  if (X.size() == 0) return 0.0;
  Eigen::LLT<Matrix> llt(symmetrize(X));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularInnovations, "matrix not positive-definite");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double logdet_hpd(const CMatrix& X) {
  if (X.size() == 0) return 0.0;
  const CMatrix H = 0.5 * (X + X.adjoint());
  Eigen::LLT<CMatrix> llt(H);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularInnovations, "Hermitian matrix not positive-definite");
  }
  return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
}

Matrix sqrtm_spd(const Matrix& X) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(X));
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorCode::IllConditioned, "square root of non-positive-definite matrix");
  }
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

Matrix inv_sqrtm_spd(const Matrix& X) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(X));
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorCode::IllConditioned, "inverse square root of non-positive-definite matrix");
  }
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

double dare_residual(const DareProblem& p, const Matrix& P) {
  return (P - riccati_step(p, P)).norm();
}

namespace {

// Bound on the magnitude of the terms that cancel in the residual. Rounding
// in the residual itself is proportional to this, not to ||Q||.
double residual_scale(const DareProblem& p, const Matrix& P) {
  const Matrix APCS = p.A * P * p.C.transpose() + p.S;
  const Matrix V = symmetrize(p.C * P * p.C.transpose() + p.R);
  const double vmin = min_eigenvalue(V);
  if (!(vmin > 0.0)) return 0.0;
  const double an = p.A.norm();
  return p.Q.norm() + an * an * P.norm() + APCS.squaredNorm() / vmin + 1.0;
}

// Symmetric square root factor M with M M' = X for symmetric PSD X.
Matrix psd_factor(const Matrix& X) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(X));
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

struct SquareRootResult {
  Matrix L;  // P = L L'
  int iterations = 0;
};

// Riccati recursion from P = 0 in square-root (array) form: an orthogonal
// triangularization of
//   [ C L   Mv ]        [ V^{1/2}  0      ]
//   [ A L   Mw ]  -->   [ Kbar     L_next ]
// with [Mw; Mv][Mw; Mv]' the joint noise covariance. P stays PSD and
// C P C' + R is formed as a sum of squares.
template <class Converged>
SquareRootResult square_root_recursion(const DareProblem& p, int max_iter, Converged converged) {
  const auto m = p.A.rows();
  const auto n = p.C.rows();
  Matrix joint(m + n, m + n);
  joint << p.Q, p.S, p.S.transpose(), p.R;
  const Matrix M = psd_factor(joint);

  SquareRootResult out;
  out.L = Matrix::Zero(m, m);
  Matrix P = Matrix::Zero(m, m);
  Matrix pre(n + m, m + m + n);
  pre.rightCols(m + n).topRows(n) = M.bottomRows(n);
  pre.rightCols(m + n).bottomRows(m) = M.topRows(m);
  double best_change = std::numeric_limits<double>::infinity();
  int last_improvement = 0;
  for (int k = 0; k < max_iter; ++k) {
    pre.leftCols(m).topRows(n) = p.C * out.L;
    pre.leftCols(m).bottomRows(m) = p.A * out.L;
    Eigen::HouseholderQR<Matrix> qr(pre.transpose());
    const Matrix post = qr.matrixQR().topRows(n + m).triangularView<Eigen::Upper>().toDenseMatrix().transpose();
    out.L = post.bottomRightCorner(m, m);
    const Matrix next = out.L * out.L.transpose();
    const double change = (next - P).norm();
    P = next;
    out.iterations = k + 1;
    if (!P.allFinite()) break;
    if (change <= 1e-15 * (P.norm() + 1.0)) break;
    // Once the change is down at rounding level, stop as soon as the
    // residual test passes, or when the change has stopped shrinking.
    if (change < best_change) {
      best_change = change;
      last_improvement = k;
    }
    if (change <= 1e-8 * (P.norm() + 1.0) && k % 10 == 0 && converged(P)) break;
    if (k - last_improvement > 500) break;
  }
  return out;
}


}  // namespace

DareSolution solve_dare(const DareProblem& problem, const DareOptions& options) {
  validate_dare(problem);
  auto threshold_at = [&](const Matrix& P) { return options.tol * residual_scale(problem, P); };

  DareSolution sol;
  auto doubling = structured_doubling(problem, options.max_iter);
  Matrix P;
  if (doubling.ok) {
    P = doubling.P;
    sol.iterations = doubling.iterations;
    // Rounding in the doubling products can leave the residual slightly
    // above threshold; a few recursion steps contract it.
    for (int k = 0; k < 10 && dare_residual(problem, P) > threshold_at(P); ++k) {
      P = riccati_step(problem, P);
      ++sol.iterations;
    }
  }
  Matrix L;
  if (!doubling.ok || dare_residual(problem, P) > threshold_at(P)) {
    sol.used_fallback = true;
    auto sr = square_root_recursion(problem, options.max_fixed_point_iter, [&](const Matrix& X) {
      return dare_residual(problem, X) <= threshold_at(X);
    });
    sol.iterations += sr.iterations;
    L = std::move(sr.L);
    P = L * L.transpose();
  }

  sol.residual_norm = dare_residual(problem, P);
  const double threshold = threshold_at(P);
  if (!(sol.residual_norm <= threshold) || !P.allFinite()) {
    std::ostringstream os;
    os << "DARE residual " << sol.residual_norm << " exceeds " << threshold;
    throw Error(ErrorCode::NonConvergence, os.str());
  }

  sol.P = symmetrize(P);
  if (L.size() > 0) {
    const Matrix CL = problem.C * L;
    sol.Sigma = symmetrize(CL * CL.transpose() + problem.R);
  } else {
    sol.Sigma = symmetrize(problem.C * sol.P * problem.C.transpose() + problem.R);
  }
  Eigen::LLT<Matrix> llt(sol.Sigma);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) {
    throw Error(ErrorCode::SingularInnovations, "C P C' + R numerically singular");
  }
  const Matrix APCS = problem.A * sol.P * problem.C.transpose() + problem.S;
  sol.K = llt.solve(APCS.transpose()).transpose();

  if (options.require_stabilizing && problem.A.rows() > 0 &&
      spectral_radius(problem.A - sol.K * problem.C) >= 1.0) {
    throw Error(ErrorCode::NonConvergence, "DARE solution is not stabilizing");
  }
  return sol;
}

Matrix solve_dlyap(const Matrix& A, const Matrix& W, double tol) {
  const auto m = A.rows();
  if (A.cols() != m || W.rows() != m || W.cols() != m) {
    throw Error(ErrorCode::DimensionMismatch, "solve_dlyap dimensions");
  }
  if (m == 0) return Matrix(0, 0);
  if (spectral_radius(A) >= 1.0) throw Error(ErrorCode::InvalidProblem, "A is not stable");

  Matrix Omega = symmetrize(W);
  Matrix Ak = A;
  for (int k = 0; k < 100; ++k) {
    Omega = symmetrize(Omega + Ak * Omega * Ak.transpose());
    Ak = Ak * Ak;
    const double a = Ak.norm();
    if (a * a <= tol * 1e-2) {
      // Remaining tail is at most a^2 ||Omega|| / (1 - a^2).
      return symmetrize(Omega + Ak * Omega * Ak.transpose());
    }
    if (!Omega.allFinite()) break;
  }
  throw Error(ErrorCode::NonConvergence, "Lyapunov doubling did not converge");
}

}  // namespace ssgc

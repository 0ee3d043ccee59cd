#include "ssgc/ar.hpp"

#include "ssgc/error.hpp"

#include <cmath>
#include <limits>

namespace ssgc {

namespace {

// Rows t = first..T-1 of [y_{t-1} ... y_{t-lags} | y_t], column-demeaned.
Matrix lagged_design(const Matrix& data, std::size_t lags, std::size_t first) {
  const auto T = data.rows();
  const auto n = data.cols();
  const auto N = T - static_cast<Eigen::Index>(first);
  const auto k = static_cast<Eigen::Index>(lags) * n;
  Matrix Z(N, k + n);
  for (std::size_t l = 1; l <= lags; ++l) {
    Z.middleCols(static_cast<Eigen::Index>(l - 1) * n, n) =
        data.middleRows(static_cast<Eigen::Index>(first - l), N);
  }
  Z.rightCols(n) = data.bottomRows(N);
  Z.rowwise() -= Z.colwise().mean();
  return Z;
}

void require_finite(const Matrix& data) {
  if (!data.allFinite()) throw Error(ErrorCode::InsufficientData, "data contains non-finite values");
}

}  // namespace

ArModel fit_ols(const Matrix& data, std::size_t p) {
  require_finite(data);
  const auto T = data.rows();
  const auto n = data.cols();
  if (p < 1) throw Error(ErrorCode::InsufficientData, "AR order must be at least 1");
  if (n < 1 || T <= n * static_cast<Eigen::Index>(p) + 1 + static_cast<Eigen::Index>(p)) {
    throw Error(ErrorCode::InsufficientData, "too few samples for the requested order");
  }
  const Matrix Z = lagged_design(data, p, p);
  const auto k = static_cast<Eigen::Index>(p) * n;
  const Matrix X = Z.leftCols(k);
  const Matrix Y = Z.rightCols(n);

  Eigen::ColPivHouseholderQR<Matrix> qr(X);
  qr.setThreshold(1e-12);
  if (qr.rank() < k) throw Error(ErrorCode::RankDeficient, "lagged regressors are collinear");
  const Matrix B = qr.solve(Y);  // k x n
  const Matrix E = Y - X * B;

  ArModel model;
  model.coeffs.reserve(p);
  for (std::size_t l = 0; l < p; ++l) {
    model.coeffs.push_back(B.middleRows(static_cast<Eigen::Index>(l) * n, n).transpose());
  }
  model.SigmaEps = symmetrize(E.transpose() * E / static_cast<double>(T - static_cast<Eigen::Index>(p)));
  return model;
}

OrderSelection select_order(const Matrix& data, std::size_t p_max) {
  require_finite(data);
  const auto T = data.rows();
  const auto n = data.cols();
  if (p_max < 1) throw Error(ErrorCode::InsufficientData, "p_max must be at least 1");
  const auto kx = static_cast<Eigen::Index>(p_max) * n;
  if (n < 1 || T - static_cast<Eigen::Index>(p_max) <= kx + 1) {
    throw Error(ErrorCode::InsufficientData, "too few samples for p_max");
  }

  // One QR of [X_pmax | Y] serves every nested order: the residual cross
  // products for the first k regressors are R[k:, Y]' R[k:, Y].
  const Matrix Z = lagged_design(data, p_max, p_max);
  Eigen::HouseholderQR<Matrix> qr(Z);
  const Matrix R = qr.matrixQR().topRows(kx + n).triangularView<Eigen::Upper>();
  const double dmax = R.diagonal().head(kx).cwiseAbs().maxCoeff();

  OrderSelection out;
  out.T_eff = static_cast<std::size_t>(Z.rows());
  const double Te = static_cast<double>(out.T_eff);
  double best_bic = std::numeric_limits<double>::infinity();
  double best_aic = std::numeric_limits<double>::infinity();
  for (std::size_t p = 1; p <= p_max; ++p) {
    const auto k = static_cast<Eigen::Index>(p) * n;
    if (R.diagonal().segment(k - n, n).cwiseAbs().minCoeff() <= 1e-12 * dmax) {
      throw Error(ErrorCode::RankDeficient, "lagged regressors are collinear");
    }
    const Matrix tail = R.block(k, kx, kx + n - k, n);
    const Matrix Sig = tail.transpose() * tail / Te;
    const double ld = logdet_spd(Sig);
    const double params = static_cast<double>(p) * static_cast<double>(n * n);
    const double aic = ld + 2.0 * params / Te;
    const double bic = ld + params * std::log(Te) / Te;
    out.logdet.push_back(ld);
    out.aic.push_back(aic);
    out.bic.push_back(bic);
    if (bic < best_bic) {
      best_bic = bic;
      out.chosen = p;
    }
    if (aic < best_aic) {
      best_aic = aic;
      out.aic_chosen = p;
    }
  }
  return out;
}

Matrix companion(const ArModel& model) {
  const auto n = model.n();
  const auto p = static_cast<Eigen::Index>(model.p());
  Matrix A = Matrix::Zero(p * n, p * n);
  for (Eigen::Index l = 0; l < p; ++l) {
    A.block(0, l * n, n, n) = model.coeffs[static_cast<std::size_t>(l)];
  }
  if (p > 1) A.block(n, 0, (p - 1) * n, (p - 1) * n).setIdentity();
  return A;
}

StateSpaceInnovations ar_to_ss(const ArModel& model) {
  const auto n = model.n();
  if (model.p() < 1 || n < 1) throw Error(ErrorCode::InvalidModel, "empty AR model");
  for (const auto& Ak : model.coeffs) {
    if (Ak.rows() != n || Ak.cols() != n) {
      throw Error(ErrorCode::InvalidModel, "AR coefficient shape does not match covariance");
    }
  }
  const Matrix A = companion(model);
  if (spectral_radius(A) >= 1.0) throw Error(ErrorCode::InvalidModel, "AR model is not stationary");
  if (min_eigenvalue(model.SigmaEps) <= 0.0) {
    throw Error(ErrorCode::InvalidModel, "residual covariance not positive-definite");
  }
  const auto m = A.rows();
  StateSpaceInnovations ss;
  ss.A = A;
  ss.C = A.topRows(n);
  ss.K = Matrix::Zero(m, n);
  ss.K.topRows(n).setIdentity();
  ss.Sigma = model.SigmaEps;
  return ss;
}

}  // namespace ssgc

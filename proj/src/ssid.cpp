#include "ssgc/ssid.hpp"

#include "ssgc/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace ssgc {

namespace {

Matrix ridged(const Matrix& X, double ridge) {
  const double d = static_cast<double>(X.rows());
  Matrix out = symmetrize(X);
  out.diagonal().array() += ridge * std::max(out.trace(), 0.0) / d;
  return out;
}

Matrix safe_inv_sqrt(const Matrix& X) {
  try {
    return inv_sqrtm_spd(X);
  } catch (const Error&) {
    throw Error(ErrorCode::IllConditioned, "covariance square root failed despite ridge");
  }
}

// Least squares Y = B X (columns are observations).
Matrix regress(const Matrix& Y, const Matrix& X) {
  Eigen::ColPivHouseholderQR<Matrix> qr(X.transpose());
  if (qr.rank() < X.rows()) throw Error(ErrorCode::IllConditioned, "state regression is rank deficient");
  return qr.solve(Y.transpose()).transpose();
}

}  // namespace

OrderChoice sdc_order(const std::vector<double>& s2) {
  if (s2.size() < 4) throw Error(ErrorCode::TooFewValues, "SDC needs at least 4 singular values");
  OrderChoice out;
  out.first_m = 2;
  // 1-based m maps to s2[m-1]. Differences within rounding of the largest
  // value count as ties, which go to the smaller m.
  const double tie = 1e-12 * std::abs(s2.front());
  double best = 0.0;
  for (std::size_t m = 2; m + 1 <= s2.size(); ++m) {
    const double v = s2[m] - 2.0 * s2[m - 1] + s2[m - 2];
    out.curve.push_back(v);
    if (out.curve.size() == 1 || v > best + tie) {
      best = v;
      out.chosen = m;
    }
  }
  return out;
}

OrderChoice svc_order(const std::vector<double>& s2, std::size_t n, std::size_t T) {
  if (s2.empty()) throw Error(ErrorCode::TooFewValues, "SVC needs at least 1 singular value");
  OrderChoice out;
  out.first_m = 1;
  const double penalty = 2.0 * static_cast<double>(n) * std::log(static_cast<double>(T)) /
                         static_cast<double>(T);
  double best = 0.0;
  for (std::size_t m = 1; m <= s2.size(); ++m) {
    const double next = m < s2.size() ? s2[m] : 0.0;
    const double v = next + penalty * static_cast<double>(m);
    out.curve.push_back(v);
    if (m == 1 || v < best) {
      best = v;
      out.chosen = m;
    }
  }
  return out;
}

SsidConfig default_horizons(const OrderSelection& selection) {
  SsidConfig cfg;
  cfg.past_horizon = std::max<std::size_t>(1, selection.chosen);
  cfg.future_horizon = cfg.past_horizon;
  return cfg;
}

SsidConfig default_horizons(const Matrix& data, std::size_t p_max) {
  return default_horizons(select_order(data, p_max));
}

SsidResult ssid_cca(const Matrix& data, const SsidConfig& config) {
  if (config.past_horizon < 1 || config.future_horizon < 1) {
    throw Error(ErrorCode::InvalidConfig, "horizons must be at least 1");
  }
  if (!data.allFinite()) throw Error(ErrorCode::InsufficientData, "data contains non-finite values");
  const auto T = data.rows();
  const auto n = data.cols();
  const auto p = static_cast<Eigen::Index>(config.past_horizon);
  const auto f = static_cast<Eigen::Index>(config.future_horizon);
  const auto N = T - p - f + 1;
  if (n < 1 || N <= (p + f) * n) {
    throw Error(ErrorCode::InsufficientData, "too few samples for the horizons");
  }

  Matrix Y = data.transpose();  // n x T
  Y.colwise() -= Y.rowwise().mean();

  // past_t = (y_{t-1}, ..., y_{t-p}) for t = p..T; future_t = (y_t, ..., y_{t+f-1}).
  const auto n_states = T - p + 1;
  Matrix past(p * n, n_states);
  for (Eigen::Index j = 0; j < n_states; ++j) {
    const auto t = p + j;
    for (Eigen::Index l = 1; l <= p; ++l) past.block((l - 1) * n, j, n, 1) = Y.col(t - l);
  }
  Matrix future(f * n, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index l = 0; l < f; ++l) future.block(l * n, j, n, 1) = Y.col(p + j + l);
  }
  const Matrix P = past.leftCols(N);
  const double dN = static_cast<double>(N);
  const Matrix Spp = ridged(P * P.transpose() / dN, config.ridge);
  const Matrix Sff = ridged(future * future.transpose() / dN, config.ridge);
  const Matrix Sfp = future * P.transpose() / dN;

  const Matrix Wp = safe_inv_sqrt(Spp);
  const Matrix Wf = safe_inv_sqrt(Sff);
  const Matrix beta = Wf * Sfp * Wp;
  Eigen::JacobiSVD<Matrix> svd(beta, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector sv = svd.singularValues();

  SsidResult out;
  auto& spec = out.spectrum;
  spec.sigma2.resize(static_cast<std::size_t>(sv.size()));
  for (Eigen::Index i = 0; i < sv.size(); ++i) spec.sigma2[static_cast<std::size_t>(i)] = sv(i) * sv(i);

  const auto svc = svc_order(spec.sigma2, static_cast<std::size_t>(n), static_cast<std::size_t>(T));
  spec.svc = svc.curve;
  if (spec.sigma2.size() >= 4) spec.sdc = sdc_order(spec.sigma2).curve;

  std::size_t m = config.order;
  if (m == 0) {
    if (config.criterion == OrderCriterion::SDC && spec.sigma2.size() >= 4) {
      m = sdc_order(spec.sigma2).chosen;
      spec.used = OrderCriterion::SDC;
    } else {
      m = svc.chosen;
      spec.used = OrderCriterion::SVC;
    }
  }
  if (m > spec.sigma2.size()) throw Error(ErrorCode::InvalidConfig, "state dimension exceeds singular values");
  spec.chosen_m = m;
  const auto mi = static_cast<Eigen::Index>(m);
  if (n_states - 1 <= mi + n) throw Error(ErrorCode::InsufficientData, "too few samples for the state dimension");

  // z_t = S_m^{1/2} V_m' Sigma_pp^{-1/2} past_t
  const Matrix Lz = sv.head(mi).cwiseSqrt().asDiagonal() * svd.matrixV().leftCols(mi).transpose() * Wp;
  const Matrix Z = Lz * past;  // m x (T - p + 1), last column is the state at t = T

  const auto n_obs = T - p;
  const Matrix Zo = Z.leftCols(n_obs);
  const Matrix Yo = Y.rightCols(n_obs);
  const Matrix C = regress(Yo, Zo);
  const Matrix E = Yo - C * Zo;
  const Matrix Sigma = symmetrize(E * E.transpose() / static_cast<double>(n_obs));

  Matrix X(mi + n, n_obs);
  X << Zo, E;
  const Matrix AK = regress(Z.rightCols(n_obs), X);

  auto& model = out.model;
  model.A = AK.leftCols(mi);
  model.K = AK.rightCols(n);
  model.C = C;
  model.Sigma = Sigma;

  if (min_eigenvalue(Sigma) <= 0.0) throw Error(ErrorCode::IllConditioned, "residual covariance singular");
  const double rho = spectral_radius(model.A);
  if (rho >= 1.0) {
    model.A *= (1.0 - 1e-6) / rho;
    out.stabilized = true;
  }
  if (spectral_radius(model.A - model.K * model.C) >= 1.0) {
    throw Error(ErrorCode::UnstableEstimate, "identified model is not minimum phase");
  }
  return out;
}

}  // namespace ssgc

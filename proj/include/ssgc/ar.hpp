#pragma once

#include "ssgc/ssm.hpp"

#include <vector>

namespace ssgc {

/// y_t = A_1 y_{t-1} + ... + A_p y_{t-p} + e_t,  cov(e_t) = SigmaEps.
struct ArModel {
  std::vector<Matrix> coeffs;
  Matrix SigmaEps;

  std::size_t p() const { return coeffs.size(); }
  Eigen::Index n() const { return SigmaEps.rows(); }
};

/// Least squares on lags 1..p over t = p+1..T. Sample means are removed
/// from the regressand and every regressor column over the fitted sample, so
/// an exact linear recurrence is reproduced exactly. Data rows are time.
ArModel fit_ols(const Matrix& data, std::size_t p);

struct OrderSelection {
  std::vector<double> logdet;  // ln|Sigma(p)|, index p-1
  std::vector<double> aic;
  std::vector<double> bic;
  std::size_t chosen = 1;  // BIC argmin, ties to the smaller order
  std::size_t aic_chosen = 1;
  std::size_t T_eff = 0;
};

/// AIC/BIC for p = 1..p_max on the common sample t = p_max+1..T.
OrderSelection select_order(const Matrix& data, std::size_t p_max);

/// Companion embedding: state (y_{t-1}, ..., y_{t-p}).
StateSpaceInnovations ar_to_ss(const ArModel& model);

/// Companion matrix of the coefficients.
Matrix companion(const ArModel& model);

}  // namespace ssgc

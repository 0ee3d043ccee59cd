#pragma once

#include "ssgc/numkern.hpp"

#include <string>
#include <vector>

namespace ssgc {

/// x_{t+1} = A x_t + u_t,  y_t = C x_t + v_t,  cov[u; v] = [[Q, S], [S', R]].
struct StateSpaceGeneral {
  Matrix A, C, Q, R, S;

  Eigen::Index m() const { return A.rows(); }
  Eigen::Index n() const { return C.rows(); }
};

/// z_{t+1} = A z_t + K e_t,  y_t = C z_t + e_t,  cov(e_t) = Sigma.
struct StateSpaceInnovations {
  Matrix A, C, K, Sigma;

  Eigen::Index m() const { return A.rows(); }
  Eigen::Index n() const { return C.rows(); }
};

/// Innovations parameters viewed as a general-form model (Q = K Sigma K',
/// S = K Sigma, R = Sigma).
StateSpaceGeneral to_general(const StateSpaceInnovations& model);

/// Values on the closed grid omega_j = j pi / (N - 1), z = exp(-i omega).
struct SpectralMatrix {
  std::vector<double> frequencies;
  std::vector<CMatrix> values;
};

std::vector<double> frequency_grid(std::size_t points);

struct AutocovSequence {
  std::vector<Matrix> Gamma;  // Gamma[k] = E[y_t y_{t-k}']
  Matrix Omega;               // state covariance
};

struct ValidationCheck {
  std::string name;
  double value = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool ok() const;
  const ValidationCheck* find(const std::string& name) const;
};

/// Stability, minimum phase (innovations form only) and covariance
/// definiteness. Throws DimensionMismatch for inconsistent shapes.
ValidationReport validate(const StateSpaceGeneral& model);
ValidationReport validate(const StateSpaceInnovations& model);

void check_dimensions(const StateSpaceGeneral& model);
void check_dimensions(const StateSpaceInnovations& model);

StateSpaceInnovations to_innovations(const StateSpaceGeneral& model,
                                     const DareOptions& options = {});

/// Series composition y = G(L) ybar where ybar is generated by `inner` and the
/// filter G(z) = I + C_f (I - A_f z)^{-1} K_f z is given by the (A, C, K) of
/// `filter` (its Sigma is ignored). The combined state is (filter, inner).
StateSpaceGeneral cascade(const StateSpaceInnovations& filter, const StateSpaceInnovations& inner);

/// H(z) = I + C (I - A z)^{-1} K z.
SpectralMatrix transfer_function(const StateSpaceInnovations& model,
                                 const std::vector<double>& frequencies);

/// B(z) = I - C (I - (A - K C) z)^{-1} K z = H(z)^{-1}.
SpectralMatrix inverse_transfer_function(const StateSpaceInnovations& model,
                                         const std::vector<double>& frequencies);

/// S(z) = H(z) Sigma H(z)^*.
SpectralMatrix cpsd(const StateSpaceInnovations& model, const std::vector<double>& frequencies);

AutocovSequence autocovariance(const StateSpaceInnovations& model, std::size_t max_lag);

// Single-frequency evaluations, shared with the causality module.
CMatrix transfer_at(const Matrix& A, const Matrix& C, const Matrix& K, Complex z);
CMatrix inverse_transfer_at(const Matrix& A, const Matrix& C, const Matrix& K, Complex z);

}  // namespace ssgc

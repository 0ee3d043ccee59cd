#include "ssgc/ssm.hpp"

#include "ssgc/error.hpp"

#include <cmath>
#include <numbers>

namespace ssgc {

namespace {

constexpr double kDefiniteTol = 1e-12;

double definiteness_threshold(const Matrix& X) { return kDefiniteTol * std::max(1.0, X.norm()); }

void require(bool cond, const char* what) {
  if (!cond) throw Error(ErrorCode::DimensionMismatch, what);
}

}  // namespace

StateSpaceGeneral to_general(const StateSpaceInnovations& model) {
  check_dimensions(model);
  const Matrix KS = model.K * model.Sigma;
  return {model.A, model.C, symmetrize(KS * model.K.transpose()), model.Sigma, KS};
}

std::vector<double> frequency_grid(std::size_t points) {
  if (points < 2) throw Error(ErrorCode::InvalidConfig, "frequency grid needs at least 2 points");
  std::vector<double> w(points);
  for (std::size_t j = 0; j < points; ++j) {
    w[j] = std::numbers::pi * static_cast<double>(j) / static_cast<double>(points - 1);
  }
  w.back() = std::numbers::pi;
  return w;
}

bool ValidationReport::ok() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

void check_dimensions(const StateSpaceGeneral& model) {
  const auto m = model.A.rows();
  const auto n = model.C.rows();
  require(model.A.cols() == m, "A must be square");
  require(model.C.cols() == m, "C must be n x m");
  require(model.Q.rows() == m && model.Q.cols() == m, "Q must be m x m");
  require(model.R.rows() == n && model.R.cols() == n, "R must be n x n");
  require(model.S.rows() == m && model.S.cols() == n, "S must be m x n");
  require(n > 0, "observation dimension must be positive");
}

void check_dimensions(const StateSpaceInnovations& model) {
  const auto m = model.A.rows();
  const auto n = model.C.rows();
  require(model.A.cols() == m, "A must be square");
  require(model.C.cols() == m, "C must be n x m");
  require(model.K.rows() == m && model.K.cols() == n, "K must be m x n");
  require(model.Sigma.rows() == n && model.Sigma.cols() == n, "Sigma must be n x n");
  require(n > 0, "observation dimension must be positive");
}

ValidationReport validate(const StateSpaceGeneral& model) {
  check_dimensions(model);
  ValidationReport report;
  const double rho = spectral_radius(model.A);
  report.checks.push_back({"stability", rho, rho < 1.0});
  const double rmin = min_eigenvalue(model.R);
  report.checks.push_back({"positive_definite", rmin, rmin > definiteness_threshold(model.R)});
  Matrix joint(model.m() + model.n(), model.m() + model.n());
  joint << model.Q, model.S, model.S.transpose(), model.R;
  const double jmin = min_eigenvalue(joint);
  report.checks.push_back({"noise_psd", jmin, jmin >= -1e-10 * std::max(1.0, joint.norm())});
  const bool symmetric = (model.Q - model.Q.transpose()).norm() <= 1e-10 * (1.0 + model.Q.norm()) &&
                         (model.R - model.R.transpose()).norm() <= 1e-10 * (1.0 + model.R.norm());
  report.checks.push_back({"symmetric", symmetric ? 1.0 : 0.0, symmetric});
  return report;
}

ValidationReport validate(const StateSpaceInnovations& model) {
  check_dimensions(model);
  ValidationReport report;
  const double rho = spectral_radius(model.A);
  report.checks.push_back({"stability", rho, rho < 1.0});
  const double rho_mp = spectral_radius(model.A - model.K * model.C);
  report.checks.push_back({"minimum_phase", rho_mp, rho_mp < 1.0});
  const double smin = min_eigenvalue(model.Sigma);
  report.checks.push_back({"positive_definite", smin, smin > definiteness_threshold(model.Sigma)});
  const bool symmetric =
      (model.Sigma - model.Sigma.transpose()).norm() <= 1e-10 * (1.0 + model.Sigma.norm());
  report.checks.push_back({"symmetric", symmetric ? 1.0 : 0.0, symmetric});
  return report;
}

StateSpaceInnovations to_innovations(const StateSpaceGeneral& model, const DareOptions& options) {
  check_dimensions(model);
  const auto sol = solve_dare({model.A, model.C, model.Q, model.R, model.S}, options);
  return {model.A, model.C, sol.K, sol.Sigma};
}

StateSpaceGeneral cascade(const StateSpaceInnovations& filter, const StateSpaceInnovations& inner) {
  const auto mf = filter.A.rows();
  const auto mi = inner.A.rows();
  const auto n = inner.C.rows();
  require(filter.A.cols() == mf && filter.C.cols() == mf, "filter A/C shapes");
  require(filter.K.rows() == mf, "filter K rows");
  require(filter.C.rows() == n && filter.K.cols() == n,
          "filter input dimension must equal inner output dimension");
  require(inner.A.cols() == mi && inner.C.cols() == mi && inner.K.rows() == mi &&
              inner.K.cols() == n && inner.Sigma.rows() == n && inner.Sigma.cols() == n,
          "inner model shapes");

  // Filter state is driven by the inner observation C z + e.
  const auto m = mf + mi;
  Matrix A = Matrix::Zero(m, m);
  A.topLeftCorner(mf, mf) = filter.A;
  A.topRightCorner(mf, mi) = filter.K * inner.C;
  A.bottomRightCorner(mi, mi) = inner.A;

  Matrix C(n, m);
  C << filter.C, inner.C;

  Matrix L(m, n);
  L << filter.K, inner.K;

  const Matrix LS = L * inner.Sigma;
  return {A, C, symmetrize(LS * L.transpose()), inner.Sigma, LS};
}

CMatrix transfer_at(const Matrix& A, const Matrix& C, const Matrix& K, Complex z) {
  const auto n = C.rows();
  const auto m = A.rows();
  CMatrix H = CMatrix::Identity(n, n);
  if (m == 0) return H;
  const CMatrix M = CMatrix::Identity(m, m) - A.cast<Complex>() * z;
  Eigen::PartialPivLU<CMatrix> lu(M);
  const CMatrix X = lu.solve(K.cast<Complex>() * z);
  H += C.cast<Complex>() * X;
  if (!H.allFinite()) throw Error(ErrorCode::SingularSolve, "transfer function solve");
  return H;
}

CMatrix inverse_transfer_at(const Matrix& A, const Matrix& C, const Matrix& K, Complex z) {
  const auto n = C.rows();
  const auto m = A.rows();
  CMatrix B = CMatrix::Identity(n, n);
  if (m == 0) return B;
  const Matrix AKC = A - K * C;
  const CMatrix M = CMatrix::Identity(m, m) - AKC.cast<Complex>() * z;
  Eigen::PartialPivLU<CMatrix> lu(M);
  B -= C.cast<Complex>() * lu.solve(K.cast<Complex>() * z);
  if (!B.allFinite()) throw Error(ErrorCode::SingularSolve, "inverse transfer function solve");
  return B;
}

namespace {

Complex unit_point(double omega) { return std::polar(1.0, -omega); }

}  // namespace

SpectralMatrix transfer_function(const StateSpaceInnovations& model,
                                 const std::vector<double>& frequencies) {
  check_dimensions(model);
  SpectralMatrix out;
  out.frequencies = frequencies;
  out.values.reserve(frequencies.size());
  for (double w : frequencies) {
    out.values.push_back(transfer_at(model.A, model.C, model.K, unit_point(w)));
  }
  return out;
}

SpectralMatrix inverse_transfer_function(const StateSpaceInnovations& model,
                                         const std::vector<double>& frequencies) {
  check_dimensions(model);
  SpectralMatrix out;
  out.frequencies = frequencies;
  out.values.reserve(frequencies.size());
  for (double w : frequencies) {
    out.values.push_back(inverse_transfer_at(model.A, model.C, model.K, unit_point(w)));
  }
  return out;
}

SpectralMatrix cpsd(const StateSpaceInnovations& model, const std::vector<double>& frequencies) {
  auto out = transfer_function(model, frequencies);
  const CMatrix Sigma = model.Sigma.cast<Complex>();
  for (auto& H : out.values) {
    CMatrix S = H * Sigma * H.adjoint();
    H = 0.5 * (S + S.adjoint());
  }
  return out;
}

AutocovSequence autocovariance(const StateSpaceInnovations& model, std::size_t max_lag) {
  check_dimensions(model);
  AutocovSequence out;
  const Matrix KS = model.K * model.Sigma;
  out.Omega = solve_dlyap(model.A, symmetrize(KS * model.K.transpose()));
  out.Gamma.reserve(max_lag + 1);
  const Matrix OCt = out.Omega * model.C.transpose();
  out.Gamma.push_back(symmetrize(model.C * OCt + model.Sigma));
  // Gamma_k = C A^{k-1} (A Omega C' + K Sigma)
  const Matrix G = model.A * OCt + KS;
  Matrix CAk = model.C;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    out.Gamma.push_back(CAk * G);
    CAk = CAk * model.A;
  }
  return out;
}

}  // namespace ssgc

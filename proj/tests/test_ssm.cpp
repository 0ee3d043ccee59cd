#include "oracles.hpp"

#include "ssgc/ar.hpp"
#include "ssgc/error.hpp"
#include "ssgc/harness.hpp"
#include "ssgc/ssm.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ssgc;

namespace {

Matrix scalar(double x) { return Matrix::Constant(1, 1, x); }

StateSpaceInnovations white_noise(Eigen::Index n) {
  return {Matrix(0, 0), Matrix(n, 0), Matrix(0, n), Matrix::Identity(n, n)};
}

StateSpaceInnovations minimal_var_ss(double a, double b, double c) {
  MinimalVarParams p;
  p.a = a;
  p.b = b;
  p.c = c;
  return ar_to_ss(minimal_var_model(p));
}

}  // namespace

TEST_CASE("validate reports each condition") {
  const StateSpaceInnovations ok{scalar(0.5), scalar(1.0), scalar(0.3), scalar(1.0)};
  const auto rep = validate(ok);
  CHECK(rep.ok());
  CHECK(rep.find("stability")->value == doctest::Approx(0.5));
  CHECK(rep.find("minimum_phase")->value == doctest::Approx(0.2));

  auto unstable = ok;
  unstable.A = scalar(1.01);
  CHECK_FALSE(validate(unstable).find("stability")->pass);

  StateSpaceInnovations singular{Matrix::Zero(2, 2), Matrix::Identity(2, 2), Matrix::Zero(2, 2),
                                 Matrix::Zero(2, 2)};
  singular.Sigma(0, 0) = 1.0;
  CHECK_FALSE(validate(singular).find("positive_definite")->pass);

  StateSpaceInnovations bad{scalar(0.5), Matrix::Ones(1, 2), scalar(0.3), scalar(1.0)};
  CHECK_THROWS_AS(validate(bad), Error);

  const auto general = to_general(ok);
  CHECK(validate(general).ok());
}

TEST_CASE("to_innovations recovers innovations parameters") {
  SUBCASE("P = 0 fixed point") {
    std::mt19937_64 gen(17);
    for (int i = 0; i < 20; ++i) {
      const auto s = oracle::random_innovations(gen, 1 + i % 6, 1 + i % 3);
      const auto back = to_innovations(to_general(s));
      CHECK((back.K - s.K).norm() <= 1e-9);
      CHECK((back.Sigma - s.Sigma).norm() <= 1e-9);
    }
  }
  SUBCASE("AR(1) through its one-step predictor state") {
    // x_t = 0.9 y_{t-1}: x_{t+1} = 0.9 x_t + 0.9 e_t, y_t = x_t + e_t.
    const StateSpaceGeneral g{scalar(0.9), scalar(1.0), scalar(0.81), scalar(1.0), scalar(0.9)};
    const auto s = to_innovations(g);
    CHECK(std::abs(s.Sigma(0, 0) - 1.0) < 1e-10);
    CHECK(std::abs(s.K(0, 0) - 0.9) < 1e-10);
  }
  SUBCASE("AR(1) observed in additive noise") {
    // A noisy observation is ARMA(1,1): innovations variance exceeds the noise variance.
    const StateSpaceGeneral g{scalar(0.9), scalar(1.0), scalar(1.0), scalar(0.5), scalar(0.0)};
    const auto s = to_innovations(g);
    const auto P = oracle::riccati_fixed_point({g.A, g.C, g.Q, g.R, g.S});
    CHECK(std::abs(s.Sigma(0, 0) - (P(0, 0) + 0.5)) < 1e-10);
    CHECK(validate(s).ok());
  }
}

TEST_CASE("cascade with an identity filter leaves the spectrum unchanged") {
  std::mt19937_64 gen(23);
  const auto inner = oracle::random_innovations(gen, 3, 2);
  const StateSpaceInnovations identity{Matrix(0, 0), Matrix(2, 0), Matrix(0, 2), Matrix::Identity(2, 2)};
  const auto out = to_innovations(cascade(identity, inner));
  const auto grid = frequency_grid(64);
  const auto S0 = cpsd(inner, grid);
  const auto S1 = cpsd(out, grid);
  for (std::size_t j = 0; j < grid.size(); ++j) CHECK((S0.values[j] - S1.values[j]).norm() < 1e-10);
}

TEST_CASE("cascade of a one-tap FIR filter with white noise is MA(1)") {
  const double f = 0.6;
  const StateSpaceInnovations fir{scalar(0.0), scalar(f), scalar(1.0), scalar(1.0)};
  const auto model = to_innovations(cascade(fir, white_noise(1)));
  const auto ac = autocovariance(model, 4);
  CHECK(std::abs(ac.Gamma[0](0, 0) - (1 + f * f)) < 1e-12);
  CHECK(std::abs(ac.Gamma[1](0, 0) - f) < 1e-12);
  for (int k = 2; k <= 4; ++k) CHECK(std::abs(ac.Gamma[k](0, 0)) < 1e-12);
  CHECK_THROWS_AS(cascade(fir, white_noise(2)), Error);
}

TEST_CASE("binomial filter on channel 1 shapes the spectrum") {
  const double f = 0.6;
  const auto filt = filter_system({f, 0.0, 2});
  const auto model = to_innovations(cascade(filt, white_noise(2)));
  const auto grid = frequency_grid(33);
  const auto S = cpsd(model, grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double mag2 = std::norm(1.0 + f * std::polar(1.0, -grid[j]));
    CHECK(std::abs(S.values[j](0, 0).real() - mag2 * mag2) < 1e-10);
    CHECK(std::abs(S.values[j](1, 1).real() - 1.0) < 1e-10);
  }
}

TEST_CASE("transfer functions of the minimal VAR") {
  const double a = 0.9, b = 0.8, c = 0.3;
  const auto model = minimal_var_ss(a, b, c);
  const auto grid = frequency_grid(129);
  const auto H = transfer_function(model, grid);
  const auto B = inverse_transfer_function(model, grid);
  const auto S = cpsd(model, grid);
  Matrix A1(2, 2);
  A1 << a, c, 0, b;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Complex z = std::polar(1.0, -grid[j]);
    CHECK((H.values[j] - oracle::minimal_var_transfer(a, b, c, z)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((B.values[j] - (CMatrix::Identity(2, 2) - A1.cast<Complex>() * z)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((H.values[j] * B.values[j] - CMatrix::Identity(2, 2)).norm() < 1e-10);
    const double s11 = (1 + b * b + c * c - 2 * b * z.real()) / (std::norm(1.0 - a * z) * std::norm(1.0 - b * z));
    CHECK(std::abs(S.values[j](0, 0).real() - s11) < 1e-10 * s11);
  }
}

TEST_CASE("K = 0 gives identity transfer and flat spectrum") {
  std::mt19937_64 gen(29);
  auto s = oracle::random_innovations(gen, 3, 2);
  s.K.setZero();
  const auto grid = frequency_grid(16);
  const auto H = transfer_function(s, grid);
  const auto B = inverse_transfer_function(s, grid);
  const auto S = cpsd(s, grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK((H.values[j] - CMatrix::Identity(2, 2)).norm() < 1e-15);
    CHECK((B.values[j] - CMatrix::Identity(2, 2)).norm() < 1e-15);
    CHECK((S.values[j] - s.Sigma.cast<Complex>()).norm() < 1e-14);
  }
  const auto ac = autocovariance(s, 3);
  CHECK((ac.Gamma[0] - s.Sigma).norm() < 1e-14);
  for (int k = 1; k <= 3; ++k) CHECK(ac.Gamma[k].norm() < 1e-14);
}

TEST_CASE("random models: H B = I, Hermitian PSD spectra, Wiener-Khinchin") {
  std::mt19937_64 gen(31);
  const auto grid = frequency_grid(4096);
  for (int i = 0; i < 10; ++i) {
    const auto s = oracle::random_innovations(gen, 1 + i % 5, 1 + i % 3);
    const auto H = transfer_function(s, grid);
    const auto B = inverse_transfer_function(s, grid);
    const auto S = cpsd(s, grid);
    Matrix integral = Matrix::Zero(s.n(), s.n());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      CHECK((H.values[j] * B.values[j] - CMatrix::Identity(s.n(), s.n())).norm() < 1e-10);
      CHECK((S.values[j] - S.values[j].adjoint()).norm() <= 1e-12);
      Eigen::SelfAdjointEigenSolver<CMatrix> es(S.values[j]);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10);
      const double w = (j == 0 || j + 1 == grid.size()) ? 0.5 : 1.0;
      integral += w * S.values[j].real();
    }
    integral /= static_cast<double>(grid.size() - 1);
    const auto ac = autocovariance(s, 0);
    CHECK((integral - ac.Gamma[0]).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("autocovariance closed forms and decay") {
  const StateSpaceInnovations ar1{scalar(0.9), scalar(0.9), scalar(1.0), scalar(1.0)};
  const auto ac = autocovariance(ar1, 40);
  CHECK(std::abs(ac.Gamma[0](0, 0) - 5.263157894736843) < 1e-10);
  for (int k = 1; k <= 40; ++k) CHECK(std::abs(ac.Gamma[k](0, 0) - std::pow(0.9, k) * ac.Gamma[0](0, 0)) < 1e-10);
  CHECK((ac.Omega - ar1.A * ac.Omega * ar1.A.transpose() - ar1.K * ar1.Sigma * ar1.K.transpose()).norm() < 1e-10);

  std::mt19937_64 gen(37);
  for (int i = 0; i < 10; ++i) {
    const auto s = oracle::random_innovations(gen, 4, 2);
    const auto seq = autocovariance(s, 200);
    const double rho = spectral_radius(s.A) + 1e-6;
    double c = 0.0;
    for (int k = 1; k <= 20; ++k) c = std::max(c, seq.Gamma[k].norm() / std::pow(rho, k));
    for (int k = 21; k <= 200; ++k) CHECK(seq.Gamma[k].norm() <= 10.0 * c * std::pow(rho, k) + 1e-300);
  }
}

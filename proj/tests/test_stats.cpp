#include "ssgc/error.hpp"
#include "ssgc/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace ssgc;

namespace {

std::vector<double> gamma_samples(double k, double theta, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::gamma_distribution<double> g(k, theta);
  std::vector<double> v(n);
  for (auto& x : v) x = g(gen);
  return v;
}

}  // namespace

TEST_CASE("digamma and trigamma against known values") {
  const double euler = 0.57721566490153286;
  CHECK(std::abs(digamma(1.0) + euler) < 1e-13);
  CHECK(std::abs(digamma(0.5) + euler + 2.0 * std::log(2.0)) < 1e-13);
  CHECK(std::abs(digamma(10.0) - 2.2517525890667211) < 1e-13);
  CHECK(std::abs(trigamma(1.0) - M_PI * M_PI / 6.0) < 1e-12);
  CHECK(std::abs(trigamma(0.5) - M_PI * M_PI / 2.0) < 1e-12);
  for (double x : {0.3, 1.7, 4.2, 25.0}) {
    CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) < 1e-13);
    CHECK(std::abs(trigamma(x) - trigamma(x + 1.0) - 1.0 / (x * x)) < 1e-12);
  }
}

TEST_CASE("Gamma ML recovers known parameters") {
  const auto v = gamma_samples(2.0, 0.5, 100000, 1);
  const auto fit = fit_gamma_ml(v);
  CHECK(fit.shape >= 1.96);
  CHECK(fit.shape <= 2.04);
  CHECK(fit.scale >= 0.49);
  CHECK(fit.scale <= 0.51);
  CHECK(std::abs(fit.mean() / mean(v) - 1.0) < 1e-12);
  CHECK(fit.n_used == v.size());
  CHECK(ks_statistic(v, fit) < 0.01);
}

TEST_CASE("exponential data has unit shape") {
  const std::size_t n = 20000;
  const auto v = gamma_samples(1.0, 3.0, n, 2);
  const auto fit = fit_gamma_ml(v);
  // Asymptotic variance of the shape MLE: 1 / (n (psi'(k) - 1/k)).
  const double se = 1.0 / std::sqrt(static_cast<double>(n) * (trigamma(1.0) - 1.0));
  CHECK(std::abs(fit.shape - 1.0) < 3.0 * se);
}

TEST_CASE("Gamma fit degenerate and small inputs") {
  const std::vector<double> constant(50, 2.5);
  CHECK_THROWS_WITH_AS(fit_gamma_ml(constant), doctest::Contains("NonConvergence"), Error);
  const std::vector<double> few{1, 2, 3, 4, 5, -1, 0, 0, 0, 0, 0};
  CHECK_THROWS_WITH_AS(fit_gamma_ml(few), doctest::Contains("TooFewSamples"), Error);
  auto v = gamma_samples(3.0, 1.0, 100, 3);
  v.push_back(-0.1);
  v.push_back(0.0);
  CHECK(fit_gamma_ml(v).n_excluded == 2);
}

TEST_CASE("Gamma fit is scale equivariant") {
  const auto v = gamma_samples(1.5, 2.0, 2000, 4);
  std::vector<double> w(v);
  for (auto& x : w) x *= 7.0;
  const auto a = fit_gamma_ml(v), b = fit_gamma_ml(w);
  CHECK(std::abs(a.shape - b.shape) < 1e-9);
  CHECK(std::abs(b.scale / a.scale - 7.0) < 1e-9);
  CHECK(std::abs(a.quantile(a.cdf(3.0)) - 3.0) < 1e-9);
}

TEST_CASE("empirical quantile interpolates linearly") {
  const std::vector<double> v{4, 1, 3, 2, 5};
  CHECK(empirical_quantile(v, 0.0) == 1.0);
  CHECK(empirical_quantile(v, 1.0) == 5.0);
  CHECK(empirical_quantile(v, 0.5) == 3.0);
  CHECK(empirical_quantile(v, 0.9) == doctest::Approx(4.6));
}

TEST_CASE("power and bias") {
  const auto null = gamma_samples(2.0, 1.0, 10000, 5);
  SUBCASE("identical samples give power alpha") {
    const auto r = power_and_bias(null, null, 0.0, 0.05, PowerSource::Empirical);
    CHECK(std::abs(r.power - 0.05) <= 1.0 / static_cast<double>(null.size()));
    CHECK(r.bias == doctest::Approx(mean(null)));
    const auto g = power_and_bias(null, null, 0.0, 0.05, PowerSource::Gamma);
    CHECK(std::abs(g.power - 0.05) < 1e-9);
  }
  SUBCASE("all causal samples above the null maximum") {
    std::vector<double> causal(null);
    const double top = *std::max_element(null.begin(), null.end());
    for (auto& x : causal) x += top;
    CHECK(power_and_bias(null, causal, 0.0, 0.05, PowerSource::Empirical).power == 1.0);
  }
  SUBCASE("empirical and Gamma modes agree on Gamma-distributed samples") {
    const auto causal = gamma_samples(6.0, 1.0, 10000, 6);
    const auto e = power_and_bias(null, causal, 5.0, 0.05, PowerSource::Empirical);
    const auto g = power_and_bias(null, causal, 5.0, 0.05, PowerSource::Gamma);
    CHECK(std::abs(e.power - g.power) <= 0.02);
    CHECK(std::abs(e.F_crit - g.F_crit) <= 0.1);
    CHECK(std::abs(e.bias - g.bias) < 1e-9);
  }
  SUBCASE("a shifted Gamma is not Gamma in its lower tail") {
    std::vector<double> causal(null);
    for (auto& x : causal) x += 5.0;
    const auto e = power_and_bias(null, causal, 5.0, 0.05, PowerSource::Empirical);
    const auto g = power_and_bias(null, causal, 5.0, 0.05, PowerSource::Gamma);
    CHECK(e.power == 1.0);
    CHECK(g.power < 1.0);
    CHECK(std::abs(e.power - g.power) <= 0.05);
  }
  SUBCASE("argument checks") {
    CHECK_THROWS_AS(power_and_bias({}, null, 0.0, 0.05, PowerSource::Empirical), Error);
    CHECK_THROWS_AS(power_and_bias(null, null, 0.0, 1.5, PowerSource::Empirical), Error);
  }
}

TEST_CASE("chi-square reference") {
  CHECK(chi2_reference(1, 1, 1, 1000).df == 1.0);
  const auto c = chi2_reference(3, 2, 1, 500);
  CHECK(c.df == 6.0);
  CHECK(c.mean_statistic() == doctest::Approx(6.0 / 500.0));
  CHECK(std::abs(c.cdf(c.critical(0.05)) - 0.95) < 1e-12);
  // chi2(1) upper 5% point.
  CHECK(std::abs(chi2_reference(1, 1, 1, 1).critical(0.05) - 3.841458820694124) < 1e-9);
  CHECK_THROWS_AS(chi2_reference(0, 1, 1, 10), Error);
}

TEST_CASE("Spearman correlation") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  CHECK(spearman(x, std::vector<double>{2, 4, 8, 16, 32}) == doctest::Approx(1.0));
  CHECK(spearman(x, std::vector<double>{5, 4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman(x, std::vector<double>{1, 1, 2, 2, 3}) == doctest::Approx(0.9486832980505138));
  CHECK(median(std::vector<double>{3, 1, 2, 10}) == 2.5);
}

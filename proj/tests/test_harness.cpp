#include "oracles.hpp"

#include "ssgc/error.hpp"
#include "ssgc/gc.hpp"
#include "ssgc/harness.hpp"
#include "ssgc/io.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace ssgc;

namespace {

const Partition kForward{{0}, {1}, {}};
const Partition kReverse{{1}, {0}, {}};

double max_cross_correlation(const Matrix& Y, Eigen::Index max_lag) {
  const Matrix Z = Y.rowwise() - Y.colwise().mean();
  const auto T = Z.rows();
  const double s1 = std::sqrt(Z.col(0).squaredNorm() / static_cast<double>(T));
  const double s2 = std::sqrt(Z.col(1).squaredNorm() / static_cast<double>(T));
  double worst = 0.0;
  for (Eigen::Index k = -max_lag; k <= max_lag; ++k) {
    const Eigen::Index len = T - std::abs(k);
    const double c = k >= 0 ? Z.col(0).tail(len).dot(Z.col(1).head(len))
                            : Z.col(1).tail(len).dot(Z.col(0).head(len));
    worst = std::max(worst, std::abs(c / static_cast<double>(T) / (s1 * s2)));
  }
  return worst;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.T = 400;
  c.n_trials = 3;
  c.r_values = {0, 2};
  c.burn_in = 200;
  c.p_max = 10;
  c.seed = 99;
  return c;
}

}  // namespace

TEST_CASE("make_causal_params") {
  CHECK(make_causal_params(0.0).c == 0.0);
  const auto p = make_causal_params(0.02);
  // c = sqrt(e^{-F} (e^F - 1)(e^F - b^2)) at 40 digits.
  CHECK(std::abs(p.c - 0.0867668769927741699) < 1e-15);
  CHECK(std::abs(std::log(minimal_var_reduced_variance(p)) - 0.02) < 1e-14);
  MinimalVarParams q;
  q.b = 0.3;
  CHECK(std::abs(minimal_var_reduced_variance(q) - 1.0) < 1e-15);
  CHECK_THROWS_AS(make_causal_params(-0.1), Error);
  CHECK_THROWS_AS(make_causal_params(0.02, 0.9, 1.0), Error);
  try {
    make_causal_params(0.0, 0.9, 1.0);
    FAIL("expected InvalidF");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidF);
  }
}

TEST_CASE("binomial taps") {
  const auto g = binomial_filter_taps(0.5, 3);
  REQUIRE(g.size() == 4);
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 1.5);
  CHECK(g[2] == 0.75);
  CHECK(g[3] == 0.125);
  CHECK(binomial_filter_taps(0.7, 0) == std::vector<double>{1.0});
}

TEST_CASE("simulate: identity filter, independence and determinism") {
  const auto null = make_causal_params(0.0);
  const auto Y = simulate(null, {0.6, 0.7, 0}, 20000, 1000, 5);
  CHECK(Y.rows() == 20000);
  CHECK(Y.cols() == 2);
  // Independent AR(1) channels: var of a sample cross-correlation is (1 + ab) / ((1 - ab) T).
  const double ab = null.a * null.b;
  CHECK(max_cross_correlation(Y, 20) <= 4.0 * std::sqrt((1 + ab) / ((1 - ab) * 20000.0)));

  const auto causal = make_causal_params(0.02);
  const auto a = simulate(causal, {0.6, 0.7, 4}, 500, 100, 11);
  const auto b = simulate(causal, {0.6, 0.7, 4}, 500, 100, 11);
  const auto c = simulate(causal, {0.6, 0.7, 4}, 500, 100, 12);
  CHECK(a == b);
  CHECK_FALSE(a == c);

  CHECK_THROWS_AS(simulate(causal, {0.6, 0.7, 4}, 500, 3, 1), Error);
  CHECK_THROWS_AS(simulate(causal, {0.6, 0.7, 4}, 0, 100, 1), Error);
  CHECK_THROWS_AS(simulate(causal, {1.2, 0.7, 4}, 10, 100, 1), Error);
}

TEST_CASE("simulate: r = 0 follows the VAR recurrence") {
  // Same innovations stream with and without the identity filter.
  const auto p = make_causal_params(0.02);
  const auto Y = simulate(p, {0.6, 0.7, 0}, 300, 50, 3);
  const auto Z = simulate(p, {0.1, 0.2, 0}, 300, 50, 3);
  CHECK(Y == Z);
}

TEST_CASE("simulate: long-run autocovariance of the filtered series") {
  const auto p = make_causal_params(0.02);
  const FilterParams f{0.6, 0.7, 2};
  const Eigen::Index T = 1000000, batches = 100, len = T / batches;
  const auto Y = simulate(p, f, T, 1000, 2024);
  const auto ac = autocovariance(exact_filtered_model(p, f), 1);
  for (int k = 0; k <= 1; ++k) {
    // Batch means give the standard error of each lag-k entry.
    const Matrix full = oracle::sample_autocov(Y, k);
    Matrix sum2 = Matrix::Zero(2, 2);
    for (Eigen::Index b = 0; b < batches; ++b) {
      const Matrix d = oracle::sample_autocov(Y.middleRows(b * len, len), k) - full;
      sum2 += d.cwiseProduct(d);
    }
    const Matrix se = (sum2 / static_cast<double>(batches * (batches - 1))).cwiseSqrt();
    for (Eigen::Index i = 0; i < 2; ++i)
      for (Eigen::Index j = 0; j < 2; ++j) CHECK(std::abs(full(i, j) - ac.Gamma[k](i, j)) <= 3.0 * se(i, j));
  }
}

TEST_CASE("exact filtered model") {
  const auto p = make_causal_params(0.02);
  const auto exact = exact_filtered_model(p, {0.6, 0.7, 0});
  CHECK(std::abs(gc_time(exact, kForward).value - 0.02) < 1e-12);
  CHECK(std::abs(gc_time(exact, kReverse).value) < 1e-12);
  for (int r : {1, 4, 10}) {
    const auto model = exact_filtered_model(p, {0.6, 0.7, r});
    CHECK(model.m() == 2 + 2 * r);
    CHECK(validate(model).ok());
    CHECK(std::abs(gc_time(model, kForward).value - 0.02) < 1e-9);
    CHECK(std::abs(gc_time(model, kReverse).value) < 1e-10);
  }
}

TEST_CASE("trial seeds are distinct across keys") {
  std::vector<std::uint64_t> seeds;
  for (int r : {0, 2, 4})
    for (auto kind : {ModelKind::Null, ModelKind::Causal})
      for (std::size_t i = 0; i < 50; ++i) seeds.push_back(trial_seed(1, r, kind, i));
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
  CHECK(trial_seed(1, 2, ModelKind::Null, 3) == trial_seed(1, 2, ModelKind::Null, 3));
  CHECK(trial_seed(1, 2, ModelKind::Null, 3) != trial_seed(2, 2, ModelKind::Null, 3));
}

TEST_CASE("run_trial is deterministic and paired") {
  const auto config = small_config();
  const auto [ar1, ss1] = run_trial(config, 2, ModelKind::Causal, 0);
  const auto [ar2, ss2] = run_trial(config, 2, ModelKind::Causal, 0);
  CHECK(ar1.ok());
  CHECK(ss1.ok());
  CHECK(ar1.estimator == Estimator::AR);
  CHECK(ss1.estimator == Estimator::SS);
  CHECK(ar1.seed == ss1.seed);
  CHECK(ar1.gc_estimate == ar2.gc_estimate);
  CHECK(ss1.gc_estimate == ss2.gc_estimate);
  CHECK(ar1.chosen_order == ar2.chosen_order);
  CHECK(ss1.chosen_order == ss2.chosen_order);
  CHECK(ar1.gc_estimate >= 0.0);
  CHECK(ar1.chosen_order >= 1);
}

TEST_CASE("run_experiment does not depend on the schedule") {
  const auto config = small_config();
  const auto one = run_experiment(config, 1);
  std::size_t calls = 0;
  const auto four = run_experiment(config, 4, [&](std::size_t, std::size_t) { ++calls; });
  CHECK(calls > 0);
  REQUIRE(one.records.size() == 2 * 2 * 2 * config.n_trials);
  CHECK(io::trials_csv(one.records) == io::trials_csv(four.records));
  CHECK(one.estimates(0, ModelKind::Null, Estimator::AR).size() == config.n_trials);
  REQUIRE(one.summary.size() == 2);
  CHECK(one.summary[0].r == 0);
  CHECK(one.summary[1].r == 2);
  CHECK(one.summary[0].ar.median_order >= 1.0);
}

TEST_CASE("experiment config validation") {
  auto c = small_config();
  CHECK_NOTHROW(c.validate());
  c.r_values = {0, -1};
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config();
  c.r_values.clear();
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config();
  c.alpha = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config();
  c.T = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config();
  c.r_values = {500};
  CHECK_THROWS_AS(run_experiment(c), Error);
}

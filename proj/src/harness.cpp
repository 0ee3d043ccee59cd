#include "ssgc/harness.hpp"

#include "ssgc/error.hpp"
#include "ssgc/gc.hpp"
#include "ssgc/rng.hpp"
#include "ssgc/ssid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace ssgc {

MinimalVarParams make_causal_params(double F, double a, double b) {
  if (!(F >= 0.0) || !(std::abs(a) < 1.0) || !(std::abs(b) < 1.0)) {
    throw Error(ErrorCode::InvalidF, "need F >= 0 and |a|, |b| < 1");
  }
  const double eF = std::exp(F);
  if (eF <= b * b) throw Error(ErrorCode::InvalidF, "e^F must exceed b^2");
  MinimalVarParams p;
  p.a = a;
  p.b = b;
  p.F = F;
  p.c = std::sqrt(std::exp(-F) * (eF - 1.0) * (eF - b * b));
  return p;
}

double minimal_var_reduced_variance(const MinimalVarParams& params) {
  const double b2 = params.b * params.b;
  const double D = 1.0 + b2 + params.c * params.c;
  return 0.5 * (D + std::sqrt(D * D - 4.0 * b2));
}

ArModel minimal_var_model(const MinimalVarParams& params) {
  ArModel m;
  Matrix A1(2, 2);
  A1 << params.a, params.c, 0.0, params.b;
  m.coeffs.push_back(A1);
  m.SigmaEps = Matrix::Identity(2, 2);
  return m;
}

std::vector<double> binomial_filter_taps(double f, int r) {
  if (r < 0) throw Error(ErrorCode::InvalidConfig, "MA order must be nonnegative");
  std::vector<double> g(static_cast<std::size_t>(r) + 1, 0.0);
  g[0] = 1.0;
  for (int k = 1; k <= r; ++k) {
    // Multiply by (1 + f z), highest power first.
    for (int j = k; j >= 1; --j) g[static_cast<std::size_t>(j)] += f * g[static_cast<std::size_t>(j - 1)];
  }
  return g;
}

namespace {

void check_filter(const FilterParams& filter) {
  if (filter.r < 0) throw Error(ErrorCode::InvalidConfig, "MA order must be nonnegative");
  if (!(std::max(std::abs(filter.f1), std::abs(filter.f2)) < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "filter roots must satisfy |f| < 1");
  }
}

}  // namespace

StateSpaceInnovations filter_system(const FilterParams& filter) {
  check_filter(filter);
  const auto r = static_cast<Eigen::Index>(filter.r);
  const auto g1 = binomial_filter_taps(filter.f1, filter.r);
  const auto g2 = binomial_filter_taps(filter.f2, filter.r);
  const Eigen::Index m = 2 * r;
  StateSpaceInnovations sys;
  sys.A = Matrix::Zero(m, m);
  for (Eigen::Index l = 1; l < r; ++l) sys.A.block(2 * l, 2 * (l - 1), 2, 2).setIdentity();
  sys.K = Matrix::Zero(m, 2);
  if (r > 0) sys.K.topRows(2).setIdentity();
  sys.C = Matrix::Zero(2, m);
  for (Eigen::Index k = 1; k <= r; ++k) {
    sys.C(0, 2 * (k - 1)) = g1[static_cast<std::size_t>(k)];
    sys.C(1, 2 * (k - 1) + 1) = g2[static_cast<std::size_t>(k)];
  }
  sys.Sigma = Matrix::Identity(2, 2);
  return sys;
}

Matrix simulate(const MinimalVarParams& params, const FilterParams& filter, std::size_t T,
                std::size_t burn_in, std::uint64_t seed) {
  check_filter(filter);
  if (!(std::abs(params.a) < 1.0) || !(std::abs(params.b) < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "VAR coefficients must satisfy |a|, |b| < 1");
  }
  if (T == 0) throw Error(ErrorCode::InvalidConfig, "T must be positive");
  if (burn_in < static_cast<std::size_t>(filter.r)) {
    throw Error(ErrorCode::InvalidConfig, "burn_in must be at least the MA order");
  }
  const std::size_t total = T + burn_in;
  CounterRng rng(seed);
  Matrix raw(static_cast<Eigen::Index>(total), 2);
  double y1 = 0.0, y2 = 0.0;
  for (std::size_t t = 0; t < total; ++t) {
    const double e1 = rng.normal();
    const double e2 = rng.normal();
    const double n1 = params.a * y1 + params.c * y2 + e1;
    const double n2 = params.b * y2 + e2;
    y1 = n1;
    y2 = n2;
    raw(static_cast<Eigen::Index>(t), 0) = y1;
    raw(static_cast<Eigen::Index>(t), 1) = y2;
  }
  const auto g1 = binomial_filter_taps(filter.f1, filter.r);
  const auto g2 = binomial_filter_taps(filter.f2, filter.r);
  Matrix out(static_cast<Eigen::Index>(T), 2);
  for (std::size_t t = burn_in; t < total; ++t) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < g1.size() && k <= t; ++k) {
      s1 += g1[k] * raw(static_cast<Eigen::Index>(t - k), 0);
      s2 += g2[k] * raw(static_cast<Eigen::Index>(t - k), 1);
    }
    out(static_cast<Eigen::Index>(t - burn_in), 0) = s1;
    out(static_cast<Eigen::Index>(t - burn_in), 1) = s2;
  }
  return out;
}

StateSpaceInnovations exact_filtered_model(const MinimalVarParams& params, const FilterParams& filter) {
  const auto inner = ar_to_ss(minimal_var_model(params));
  return to_innovations(cascade(filter_system(filter), inner));
}

std::string to_string(ModelKind kind) { return kind == ModelKind::Null ? "null" : "causal"; }
std::string to_string(Estimator est) { return est == Estimator::AR ? "ar" : "ss"; }

void ExperimentConfig::validate() const {
  if (T == 0 || n_trials == 0 || p_max == 0) throw Error(ErrorCode::InvalidConfig, "T, n_trials and p_max must be positive");
  if (r_values.empty()) throw Error(ErrorCode::InvalidConfig, "r_values must be nonempty");
  for (int r : r_values) {
    if (r < 0) throw Error(ErrorCode::InvalidConfig, "MA order must be nonnegative");
    if (static_cast<std::size_t>(r) > burn_in) throw Error(ErrorCode::InvalidConfig, "burn_in must be at least every MA order");
  }
  if (!(F > 0.0)) throw Error(ErrorCode::InvalidConfig, "causal F must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha must lie in (0, 1)");
  if (!(std::abs(a) < 1.0 && std::abs(b) < 1.0)) throw Error(ErrorCode::InvalidConfig, "|a|, |b| must be < 1");
  if (!(std::max(std::abs(f1), std::abs(f2)) < 1.0)) throw Error(ErrorCode::InvalidConfig, "|f1|, |f2| must be < 1");
  if (std::exp(F) <= b * b) throw Error(ErrorCode::InvalidConfig, "e^F must exceed b^2");
}

std::uint64_t trial_seed(std::uint64_t master, int r, ModelKind kind, std::size_t trial) {
  std::uint64_t h = mix64(master);
  h = hash_combine(h, static_cast<std::uint64_t>(r));
  h = hash_combine(h, kind == ModelKind::Null ? 0 : 1);
  return hash_combine(h, static_cast<std::uint64_t>(trial));
}

std::pair<TrialRecord, TrialRecord> run_trial(const ExperimentConfig& config, int r, ModelKind kind,
                                              std::size_t trial) {
  TrialRecord ar{r, kind, Estimator::AR, 0, std::nan(""), trial_seed(config.seed, r, kind, trial), trial, {}};
  TrialRecord ss = ar;
  ss.estimator = Estimator::SS;

  const auto params = make_causal_params(kind == ModelKind::Null ? 0.0 : config.F, config.a, config.b);
  const FilterParams filter{config.f1, config.f2, r};
  const Partition partition{{0}, {1}, {}};

  OrderSelection selection;
  try {
    const Matrix data = simulate(params, filter, config.T, config.burn_in, ar.seed);
    selection = select_order(data, config.p_max);
    ar.chosen_order = selection.chosen;
    try {
      const auto model = ar_to_ss(fit_ols(data, selection.chosen));
      ar.gc_estimate = gc_time(model, partition).value;
    } catch (const Error& e) {
      ar.error = std::string(to_string(e.code()));
    }
    try {
      const auto fit = ssid_cca(data, default_horizons(selection));
      ss.chosen_order = fit.spectrum.chosen_m;
      ss.gc_estimate = gc_time(fit.model, partition).value;
    } catch (const Error& e) {
      ss.error = std::string(to_string(e.code()));
    }
  } catch (const Error& e) {
    ar.error = ss.error = std::string(to_string(e.code()));
  }
  return {ar, ss};
}

std::vector<double> ExperimentResult::estimates(int r, ModelKind kind, Estimator est) const {
  std::vector<double> out;
  for (const auto& rec : records) {
    if (rec.r == r && rec.kind == kind && rec.estimator == est && rec.ok()) out.push_back(rec.gc_estimate);
  }
  return out;
}

namespace {

EstimatorSummary summarize_estimator(const ExperimentConfig& config, const std::vector<TrialRecord>& records,
                                     int r, Estimator est) {
  EstimatorSummary s;
  std::vector<double> null, causal, orders;
  for (const auto& rec : records) {
    if (rec.r != r || rec.estimator != est) continue;
    if (!rec.ok()) {
      (rec.kind == ModelKind::Null ? s.failures_null : s.failures_causal)++;
      continue;
    }
    (rec.kind == ModelKind::Null ? null : causal).push_back(rec.gc_estimate);
    orders.push_back(static_cast<double>(rec.chosen_order));
  }
  s.median_order = median(orders);
  s.mean_null = mean(null);
  s.mean_causal = mean(causal);
  if (null.empty() || causal.empty()) return s;

  s.empirical = power_and_bias(null, causal, config.F, config.alpha, PowerSource::Empirical);
  try {
    s.gamma = power_and_bias(null, causal, config.F, config.alpha, PowerSource::Gamma);
    s.gamma_null = s.gamma.gamma_null;
    s.gamma_causal = s.gamma.gamma_causal;
    s.ks_null = ks_statistic(null, s.gamma_null);
    s.ks_causal = ks_statistic(causal, s.gamma_causal);
    s.null_rejection_at_gamma_crit = exceedance(null, s.gamma.F_crit);
    s.gamma_ok = true;
  } catch (const Error& e) {
    s.gamma_error = e.what();
  }
  return s;
}

}  // namespace

std::vector<RSummary> summarize(const ExperimentConfig& config, const std::vector<TrialRecord>& records) {
  std::vector<RSummary> out;
  for (int r : config.r_values) {
    out.push_back({r, summarize_estimator(config, records, r, Estimator::AR),
                   summarize_estimator(config, records, r, Estimator::SS)});
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned jobs, const ProgressFn& progress) {
  config.validate();
  struct Task {
    int r;
    ModelKind kind;
    std::size_t trial;
  };
  std::vector<Task> tasks;
  for (int r : config.r_values) {
    for (auto kind : {ModelKind::Null, ModelKind::Causal}) {
      for (std::size_t i = 0; i < config.n_trials; ++i) tasks.push_back({r, kind, i});
    }
  }

  std::vector<std::pair<TrialRecord, TrialRecord>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      results[i] = run_trial(config, tasks[i].r, tasks[i].kind, tasks[i].trial);
      const auto d = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(d, tasks.size());
      }
    }
  };
  jobs = std::max(1u, jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  ExperimentResult out;
  out.records.reserve(2 * results.size());
  for (auto& [ar, ss] : results) {
    out.records.push_back(std::move(ar));
    out.records.push_back(std::move(ss));
  }
  out.summary = summarize(config, out.records);
  return out;
}

}  // namespace ssgc

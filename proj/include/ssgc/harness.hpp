#pragma once

// Minimal bivariate VAR(1) with a binomial moving-average filter: exact ground
// truth, simulation and the AR-vs-SS Monte Carlo comparison.

#include "ssgc/ar.hpp"
#include "ssgc/ssm.hpp"
#include "ssgc/stats.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace ssgc {

/// y1_t = a y1_{t-1} + c y2_{t-1} + e1_t,  y2_t = b y2_{t-1} + e2_t,  e ~ N(0, I).
struct MinimalVarParams {
  double a = 0.9;
  double b = 0.8;
  double c = 0.0;
  double F = 0.0;  // target causality y2 -> y1, nats
};

/// G(z) = diag((1 + f1 z)^r, (1 + f2 z)^r).
struct FilterParams {
  double f1 = 0.6;
  double f2 = 0.7;
  int r = 0;
};

/// c = sqrt(e^{-F} (e^F - 1)(e^F - b^2)).
MinimalVarParams make_causal_params(double F, double a = 0.9, double b = 0.8);

/// Closed-form reduced innovations variance of y1: (D + sqrt(D^2 - 4 b^2)) / 2
/// with D = 1 + b^2 + c^2.
double minimal_var_reduced_variance(const MinimalVarParams& params);

ArModel minimal_var_model(const MinimalVarParams& params);

/// Binomial coefficients of (1 + f z)^r, lowest power first.
std::vector<double> binomial_filter_taps(double f, int r);

/// The filter as an innovations-form linear system (delay-line state, 2r).
StateSpaceInnovations filter_system(const FilterParams& filter);

/// T x 2 series: VAR from a zero state, filtered with zero initial conditions,
/// first burn_in outputs discarded.
Matrix simulate(const MinimalVarParams& params, const FilterParams& filter, std::size_t T,
                std::size_t burn_in, std::uint64_t seed);

StateSpaceInnovations exact_filtered_model(const MinimalVarParams& params, const FilterParams& filter);

enum class ModelKind { Null, Causal };
enum class Estimator { AR, SS };

std::string to_string(ModelKind kind);
std::string to_string(Estimator est);

struct ExperimentConfig {
  std::size_t T = 1000;
  std::size_t n_trials = 1000;
  std::vector<int> r_values = {0, 2, 4, 6, 8, 10};
  double F = 0.02;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  std::size_t burn_in = 1000;
  double a = 0.9;
  double b = 0.8;
  double f1 = 0.6;
  double f2 = 0.7;
  std::size_t p_max = 40;

  void validate() const;
};

struct TrialRecord {
  int r = 0;
  ModelKind kind = ModelKind::Null;
  Estimator estimator = Estimator::AR;
  std::size_t chosen_order = 0;
  double gc_estimate = 0.0;
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

std::uint64_t trial_seed(std::uint64_t master, int r, ModelKind kind, std::size_t trial);

/// One replication: simulate once, estimate with both AR and SS (paired).
std::pair<TrialRecord, TrialRecord> run_trial(const ExperimentConfig& config, int r, ModelKind kind,
                                              std::size_t trial);

struct EstimatorSummary {
  std::size_t failures_null = 0;
  std::size_t failures_causal = 0;
  double median_order = 0.0;  // over all successful trials (null and causal)
  double mean_null = 0.0;
  double mean_causal = 0.0;
  bool gamma_ok = false;
  std::string gamma_error;
  GammaFit gamma_null;
  GammaFit gamma_causal;
  double ks_null = 0.0;
  double ks_causal = 0.0;
  PowerBiasReport empirical;
  PowerBiasReport gamma;
  double null_rejection_at_gamma_crit = 0.0;
};

struct RSummary {
  int r = 0;
  EstimatorSummary ar;
  EstimatorSummary ss;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;  // sorted by (r, kind, trial, estimator)
  std::vector<RSummary> summary;

  std::vector<double> estimates(int r, ModelKind kind, Estimator est) const;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned jobs = 1,
                                const ProgressFn& progress = {});

/// Aggregates per-r statistics from finished records.
std::vector<RSummary> summarize(const ExperimentConfig& config, const std::vector<TrialRecord>& records);

}  // namespace ssgc

#pragma once

// Sampling-distribution tools for causality estimators: Gamma ML fits,
// empirical quantiles, power and bias.

#include <cstddef>
#include <span>
#include <vector>

namespace ssgc {

double digamma(double x);
double trigamma(double x);

struct GammaFit {
  double shape = 0.0;  // k
  double scale = 0.0;  // theta
  std::size_t n_used = 0;
  std::size_t n_excluded = 0;  // non-positive samples dropped before fitting
  double log_likelihood = 0.0;

  double mean() const { return shape * scale; }
  double cdf(double x) const;
  double quantile(double p) const;
};

/// Maximum likelihood Gamma(k, theta) by Newton iteration on
/// ln k - psi(k) = ln(mean) - mean(ln x). Non-positive samples are excluded.
GammaFit fit_gamma_ml(std::span<const double> samples);

/// Linear interpolation between order statistics, h = (n - 1) p.
double empirical_quantile(std::span<const double> samples, double p);

/// sup_x |F_n(x) - F(x)| against a fitted Gamma.
double ks_statistic(std::span<const double> samples, const GammaFit& fit);

enum class PowerSource { Empirical, Gamma };

struct PowerBiasReport {
  double alpha = 0.0;
  double F_crit = 0.0;
  double power = 0.0;
  double bias = 0.0;
  PowerSource source = PowerSource::Empirical;
  GammaFit gamma_null;    // only in Gamma mode
  GammaFit gamma_causal;  // only in Gamma mode
  std::size_t excluded = 0;
};

PowerBiasReport power_and_bias(std::span<const double> null_samples,
                               std::span<const double> causal_samples, double F_true,
                               double alpha, PowerSource source);

/// Fraction of samples strictly above a threshold.
double exceedance(std::span<const double> samples, double threshold);

/// Asymptotic null for the nested AR likelihood ratio: T * G ~ chi2(p n1 n2).
struct Chi2Reference {
  double df = 0.0;
  double T = 0.0;

  double mean_statistic() const { return df / T; }  // E[G]
  double cdf(double g) const;                        // P(G <= g)
  double critical(double alpha) const;               // G at 1 - alpha
};

Chi2Reference chi2_reference(std::size_t p, std::size_t n1, std::size_t n2, std::size_t T);

double mean(std::span<const double> xs);
double median(std::vector<double> xs);

/// Spearman rank correlation (average ranks for ties).
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace ssgc

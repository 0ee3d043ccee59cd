#include "ssgc/stats.hpp"

#include "ssgc/error.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ssgc {

double digamma(double x) {
  if (!(x > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return boost::math::digamma(x);
}

double trigamma(double x) {
  if (!(x > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return boost::math::trigamma(x);
}

double GammaFit::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(shape, x / scale);
}

double GammaFit::quantile(double p) const {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return scale * boost::math::gamma_p_inv(shape, p);
}

GammaFit fit_gamma_ml(std::span<const double> samples) {
  GammaFit fit;
  double sum = 0.0, sum_log = 0.0;
  for (double x : samples) {
    if (x > 0.0 && std::isfinite(x)) {
      sum += x;
      sum_log += std::log(x);
      ++fit.n_used;
    } else {
      ++fit.n_excluded;
    }
  }
  if (fit.n_used < 10) throw Error(ErrorCode::TooFewSamples, "Gamma fit needs at least 10 positive samples");
  const double n = static_cast<double>(fit.n_used);
  const double m = sum / n;
  const double s = std::log(m) - sum_log / n;
  if (!(s > 1e-12)) {
    throw Error(ErrorCode::NonConvergence, "samples have (near) zero dispersion; shape diverges");
  }

  double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    const double g = std::log(k) - digamma(k) - s;
    const double dg = 1.0 / k - trigamma(k);
    double next = k - g / dg;
    if (!(next > 0.0)) next = 0.5 * k;
    const double step = std::abs(next - k);
    k = next;
    if (step <= 1e-10 * std::max(1.0, k)) {
      converged = true;
      break;
    }
  }
  if (!converged || !std::isfinite(k)) throw Error(ErrorCode::NonConvergence, "Gamma shape Newton iteration");

  fit.shape = k;
  fit.scale = m / k;
  fit.log_likelihood = (k - 1.0) * sum_log - sum / fit.scale -
                       n * (std::lgamma(k) + k * std::log(fit.scale));
  return fit;
}

double empirical_quantile(std::span<const double> samples, double p) {
  if (samples.empty()) throw Error(ErrorCode::TooFewSamples, "quantile of empty sample");
  std::vector<double> v(samples.begin(), samples.end());
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double ks_statistic(std::span<const double> samples, const GammaFit& fit) {
  std::vector<double> v(samples.begin(), samples.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double F = fit.cdf(v[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

double exceedance(std::span<const double> samples, double threshold) {
  if (samples.empty()) return 0.0;
  const auto c = std::count_if(samples.begin(), samples.end(), [&](double x) { return x > threshold; });
  return static_cast<double>(c) / static_cast<double>(samples.size());
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double median(std::vector<double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  return empirical_quantile(xs, 0.5);
}

PowerBiasReport power_and_bias(std::span<const double> null_samples,
                               std::span<const double> causal_samples, double F_true,
                               double alpha, PowerSource source) {
  if (null_samples.empty() || causal_samples.empty()) {
    throw Error(ErrorCode::TooFewSamples, "power needs nonempty null and causal samples");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha must lie in (0, 1)");
  PowerBiasReport out;
  out.alpha = alpha;
  out.source = source;
  if (source == PowerSource::Empirical) {
    out.F_crit = empirical_quantile(null_samples, 1.0 - alpha);
    out.power = exceedance(causal_samples, out.F_crit);
    out.bias = mean(causal_samples) - F_true;
  } else {
    out.gamma_null = fit_gamma_ml(null_samples);
    out.gamma_causal = fit_gamma_ml(causal_samples);
    out.excluded = out.gamma_null.n_excluded + out.gamma_causal.n_excluded;
    out.F_crit = out.gamma_null.quantile(1.0 - alpha);
    out.power = 1.0 - out.gamma_causal.cdf(out.F_crit);
    out.bias = out.gamma_causal.mean() - F_true;
  }
  return out;
}

double Chi2Reference::cdf(double g) const {
  if (g <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * df, 0.5 * T * g);
}

double Chi2Reference::critical(double alpha) const {
  return 2.0 * boost::math::gamma_p_inv(0.5 * df, 1.0 - alpha) / T;
}

Chi2Reference chi2_reference(std::size_t p, std::size_t n1, std::size_t n2, std::size_t T) {
  if (p == 0 || n1 == 0 || n2 == 0 || T == 0) {
    throw Error(ErrorCode::InvalidConfig, "chi2 reference needs positive arguments");
  }
  return {static_cast<double>(p * n1 * n2), static_cast<double>(T)};
}

namespace {

std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::InvalidConfig, "spearman needs paired samples");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double mx = mean(rx), my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace ssgc

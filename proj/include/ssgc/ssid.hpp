#pragma once

// CCA state space subspace identification with singular-value based order
// selection.

#include "ssgc/ar.hpp"
#include "ssgc/ssm.hpp"

#include <vector>

namespace ssgc {

enum class OrderCriterion { SDC, SVC };

struct SsidConfig {
  std::size_t past_horizon = 1;
  std::size_t future_horizon = 1;
  double ridge = 1e-10;    // times trace/dim, added to the past and future covariances
  std::size_t order = 0;   // 0 selects automatically
  OrderCriterion criterion = OrderCriterion::SDC;
};

struct SingularSpectrum {
  std::vector<double> sigma2;  // nonincreasing
  std::vector<double> sdc;     // SDC(m) for m = 2 .. len-1
  std::vector<double> svc;     // SVC(m) for m = 1 .. len
  std::size_t chosen_m = 0;
  OrderCriterion used = OrderCriterion::SDC;
};

struct SsidResult {
  StateSpaceInnovations model;
  SingularSpectrum spectrum;
  bool stabilized = false;  // A was rescaled onto the stable region
};

SsidResult ssid_cca(const Matrix& data, const SsidConfig& config);

struct OrderChoice {
  std::size_t chosen = 0;
  std::size_t first_m = 0;     // m of curve[0]
  std::vector<double> curve;
};

/// SDC(m) = s2[m+1] - 2 s2[m] + s2[m-1] (1-based) for 2 <= m <= len-1;
/// argmax, ties to the smaller m.
OrderChoice sdc_order(const std::vector<double>& sigma2);

/// SVC(m) = s2[m+1] + 2 m n ln(T) / T for 1 <= m <= len (s2[len+1] = 0);
/// argmin, ties to the smaller m.
OrderChoice svc_order(const std::vector<double>& sigma2, std::size_t n, std::size_t T);

/// Past and future horizons both set to the BIC AR order (at least 1).
SsidConfig default_horizons(const Matrix& data, std::size_t p_max);
SsidConfig default_horizons(const OrderSelection& selection);

}  // namespace ssgc

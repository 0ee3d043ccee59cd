#pragma once

// Granger causality from innovations-form state space parameters. Everything
// here reduces to one DARE for the reduced model (target + conditioning
// channels) and per-frequency linear solves.

#include "ssgc/ssm.hpp"

#include <vector>

namespace ssgc {

using IndexList = std::vector<Eigen::Index>;

/// Zero-based channel blocks: target (1), source (2), conditioning (3).
struct Partition {
  IndexList target;
  IndexList source;
  IndexList cond;

  /// Checks disjointness, coverage of 0..n-1 and nonempty target/source.
  void validate(Eigen::Index n) const;
  /// Target followed by conditioning channels (the reduced observation).
  IndexList reduced() const;
  /// Source followed by conditioning channels.
  IndexList others() const;
};

/// Everything except `target` and `source` goes to the conditioning block.
Partition make_partition(Eigen::Index n, IndexList target, IndexList source);

struct ReducedModel {
  Matrix A;
  Matrix Cr;
  Matrix Kr;
  Matrix SigmaR;  // ordered (target, cond)
  Eigen::Index n_target = 0;
  double residual_norm = 0.0;

  Matrix sigma_target() const { return SigmaR.topLeftCorner(n_target, n_target); }
};

ReducedModel reduce(const StateSpaceInnovations& model, const Partition& partition,
                    const DareOptions& options = {});

struct GcDiagnostics {
  double reduced_residual = 0.0;
  double det_sigma11 = 0.0;
  double det_sigma_r11 = 0.0;
  bool negative = false;  // computed value in (-1e-8, 0)
};

struct GcResult {
  double value = 0.0;  // nats
  Partition partition;
  GcDiagnostics diagnostics;
};

struct GcSpectrum {
  std::vector<double> frequencies;
  std::vector<double> values;
  Partition partition;
  bool negative = false;

  /// (1/2pi) of the integral over (-pi, pi] by the trapezoid rule on the
  /// closed [0, pi] grid, using evenness.
  double integral() const;
};

/// Values below this raise NegativeCausality; values in [floor, 0) are flagged.
inline constexpr double kNegativeFloor = -1e-8;

GcResult gc_time(const StateSpaceInnovations& model, const Partition& partition);

GcSpectrum gc_spectral_unconditional(const StateSpaceInnovations& model,
                                     const Partition& partition,
                                     const std::vector<double>& frequencies);

struct ConditionalSpectralFactors {
  std::vector<CMatrix> Htilde12;
  std::vector<CMatrix> Htilde13;
  Matrix partial_cov;  // [[S22|1, S23|1], [S32|1, S33|1]]
  ReducedModel reduced;
};

ConditionalSpectralFactors conditional_spectral_factors(const StateSpaceInnovations& model,
                                                        const Partition& partition,
                                                        const std::vector<double>& frequencies);

GcSpectrum gc_spectral_conditional(const StateSpaceInnovations& model,
                                   const Partition& partition,
                                   const std::vector<double>& frequencies);

/// Dispatches on whether the conditioning block is empty.
GcSpectrum gc_spectral(const StateSpaceInnovations& model, const Partition& partition,
                       const std::vector<double>& frequencies);

struct NoncausalityCheck {
  double max_magnitude = 0.0;
  bool noncausal = false;
};

/// max_k ||C_target (A - K C)^k K_source||_max over k = 0..m-1.
NoncausalityCheck noncausality_check(const StateSpaceInnovations& model,
                                     const Partition& partition, double tol = 1e-12);

/// Sigma_{ab|c} = Sigma_ab - Sigma_ac Sigma_cc^{-1} Sigma_cb.
Matrix partial_covariance(const Matrix& Sigma, const IndexList& a, const IndexList& b,
                          const IndexList& c);

}  // namespace ssgc

#include "ssgc/gc.hpp"

#include "ssgc/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ssgc {

namespace {

Complex unit_point(double omega) { return std::polar(1.0, -omega); }

double checked_value(double value, bool& negative, const char* what) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::NonConvergence, std::string(what) + " is not finite");
  }
  if (value < kNegativeFloor) {
    std::ostringstream os;
    os << what << " = " << value << " is below the numerical floor";
    throw Error(ErrorCode::NegativeCausality, os.str());
  }
  if (value < 0.0) negative = true;
  return value;
}

}  // namespace

void Partition::validate(Eigen::Index n) const {
  if (target.empty() || source.empty()) {
    throw Error(ErrorCode::InvalidPartition, "target and source blocks must be nonempty");
  }
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  for (const auto* block : {&target, &source, &cond}) {
    for (auto i : *block) {
      if (i < 0 || i >= n) throw Error(ErrorCode::InvalidPartition, "channel index out of range");
      if (seen[static_cast<std::size_t>(i)]++) {
        throw Error(ErrorCode::InvalidPartition, "blocks overlap");
      }
    }
  }
  if (std::any_of(seen.begin(), seen.end(), [](int s) { return s == 0; })) {
    throw Error(ErrorCode::InvalidPartition, "blocks do not cover every channel");
  }
}

IndexList Partition::reduced() const {
  IndexList out = target;
  out.insert(out.end(), cond.begin(), cond.end());
  return out;
}

IndexList Partition::others() const {
  IndexList out = source;
  out.insert(out.end(), cond.begin(), cond.end());
  return out;
}

Partition make_partition(Eigen::Index n, IndexList target, IndexList source) {
  Partition p{std::move(target), std::move(source), {}};
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::find(p.target.begin(), p.target.end(), i) == p.target.end() &&
        std::find(p.source.begin(), p.source.end(), i) == p.source.end()) {
      p.cond.push_back(i);
    }
  }
  p.validate(n);
  return p;
}

Matrix partial_covariance(const Matrix& Sigma, const IndexList& a, const IndexList& b,
                          const IndexList& c) {
  Matrix out = Sigma(a, b);
  if (c.empty()) return out;
  Eigen::LLT<Matrix> llt(symmetrize(Sigma(c, c)));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularInnovations, "conditioning covariance not positive-definite");
  }
  out -= Sigma(a, c) * llt.solve(Sigma(c, b));
  return out;
}

ReducedModel reduce(const StateSpaceInnovations& model, const Partition& partition,
                    const DareOptions& options) {
  check_dimensions(model);
  partition.validate(model.n());
  const IndexList r = partition.reduced();

  const Matrix KS = model.K * model.Sigma;
  DareProblem problem{model.A, model.C(r, Eigen::all), symmetrize(KS * model.K.transpose()),
                      symmetrize(model.Sigma(r, r)), KS(Eigen::all, r)};

  DareOptions opts = options;
  opts.require_stabilizing = false;
  const auto sol = solve_dare(problem, opts);

  ReducedModel out;
  out.A = model.A;
  out.Cr = problem.C;
  out.Kr = sol.K;
  out.SigmaR = sol.Sigma;
  out.n_target = static_cast<Eigen::Index>(partition.target.size());
  out.residual_norm = sol.residual_norm;
  if (model.m() > 0 && spectral_radius(out.A - out.Kr * out.Cr) >= 1.0) {
    throw Error(ErrorCode::ReducedNotMinimumPhase, "reduced closed loop is not stable");
  }
  return out;
}

GcResult gc_time(const StateSpaceInnovations& model, const Partition& partition) {
  const ReducedModel red = reduce(model, partition);
  const double ld_full = logdet_spd(model.Sigma(partition.target, partition.target));
  const double ld_red = logdet_spd(red.sigma_target());

  GcResult out;
  out.partition = partition;
  out.diagnostics.reduced_residual = red.residual_norm;
  out.diagnostics.det_sigma11 = std::exp(ld_full);
  out.diagnostics.det_sigma_r11 = std::exp(ld_red);
  out.value = checked_value(ld_red - ld_full, out.diagnostics.negative, "time-domain GC");
  return out;
}

GcSpectrum gc_spectral_unconditional(const StateSpaceInnovations& model,
                                     const Partition& partition,
                                     const std::vector<double>& frequencies) {
  check_dimensions(model);
  partition.validate(model.n());
  if (!partition.cond.empty()) {
    throw Error(ErrorCode::InvalidPartition, "unconditional spectral GC needs an empty conditioning block");
  }
  const auto& t = partition.target;
  const auto& s = partition.source;
  const CMatrix P = partial_covariance(model.Sigma, s, s, t).cast<Complex>();
  const CMatrix Sigma = model.Sigma.cast<Complex>();

  GcSpectrum out;
  out.frequencies = frequencies;
  out.partition = partition;
  out.values.reserve(frequencies.size());
  for (double w : frequencies) {
    const CMatrix H = transfer_at(model.A, model.C, model.K, unit_point(w));
    const CMatrix S11 = (H(t, Eigen::all) * Sigma * H(t, Eigen::all).adjoint());
    const CMatrix H12 = H(t, s);
    const CMatrix D = S11 - H12 * P * H12.adjoint();
    out.values.push_back(
        checked_value(logdet_hpd(S11) - logdet_hpd(D), out.negative, "spectral GC"));
  }
  return out;
}

ConditionalSpectralFactors conditional_spectral_factors(const StateSpaceInnovations& model,
                                                        const Partition& partition,
                                                        const std::vector<double>& frequencies) {
  ConditionalSpectralFactors out;
  out.reduced = reduce(model, partition);
  const IndexList r = partition.reduced();
  const IndexList o = partition.others();
  const auto n1 = out.reduced.n_target;
  const auto n2 = static_cast<Eigen::Index>(partition.source.size());
  out.partial_cov = partial_covariance(model.Sigma, o, o, partition.target);

  out.Htilde12.reserve(frequencies.size());
  out.Htilde13.reserve(frequencies.size());
  for (double w : frequencies) {
    const Complex z = unit_point(w);
    const CMatrix H = transfer_at(model.A, model.C, model.K, z);
    const CMatrix Br = inverse_transfer_at(out.reduced.A, out.reduced.Cr, out.reduced.Kr, z);
    const CMatrix Ht = Br.topRows(n1) * H(r, o);
    out.Htilde12.push_back(Ht.leftCols(n2));
    out.Htilde13.push_back(Ht.rightCols(Ht.cols() - n2));
  }
  return out;
}

GcSpectrum gc_spectral_conditional(const StateSpaceInnovations& model,
                                   const Partition& partition,
                                   const std::vector<double>& frequencies) {
  check_dimensions(model);
  partition.validate(model.n());
  if (partition.cond.empty()) {
    throw Error(ErrorCode::InvalidPartition, "conditional spectral GC needs a conditioning block");
  }
  const auto f = conditional_spectral_factors(model, partition, frequencies);
  const Matrix SigmaR11 = f.reduced.sigma_target();
  const double ld_num = logdet_spd(SigmaR11);
  const CMatrix Sr = SigmaR11.cast<Complex>();
  const CMatrix P = f.partial_cov.cast<Complex>();

  GcSpectrum out;
  out.frequencies = frequencies;
  out.partition = partition;
  out.values.reserve(frequencies.size());
  for (std::size_t j = 0; j < frequencies.size(); ++j) {
    CMatrix Ht(f.Htilde12[j].rows(), f.Htilde12[j].cols() + f.Htilde13[j].cols());
    Ht << f.Htilde12[j], f.Htilde13[j];
    const CMatrix D = Sr - Ht * P * Ht.adjoint();
    out.values.push_back(checked_value(ld_num - logdet_hpd(D), out.negative, "spectral GC"));
  }
  return out;
}

GcSpectrum gc_spectral(const StateSpaceInnovations& model, const Partition& partition,
                       const std::vector<double>& frequencies) {
  return partition.cond.empty() ? gc_spectral_unconditional(model, partition, frequencies)
                                : gc_spectral_conditional(model, partition, frequencies);
}

double GcSpectrum::integral() const {
  const auto N = values.size();
  if (N < 2) throw Error(ErrorCode::InvalidConfig, "spectrum needs at least 2 points");
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t j = 1; j + 1 < N; ++j) sum += values[j];
  // Uniform grid on [0, pi]: (1/pi) * h * sum with h = pi/(N-1).
  return sum / static_cast<double>(N - 1);
}

NoncausalityCheck noncausality_check(const StateSpaceInnovations& model,
                                     const Partition& partition, double tol) {
  check_dimensions(model);
  partition.validate(model.n());
  const Matrix B = model.A - model.K * model.C;
  const Matrix K2 = model.K(Eigen::all, partition.source);
  Matrix CBk = model.C(partition.target, Eigen::all);
  NoncausalityCheck out;
  for (Eigen::Index k = 0; k < model.m(); ++k) {
    const Matrix M = CBk * K2;
    if (M.size() > 0) out.max_magnitude = std::max(out.max_magnitude, M.cwiseAbs().maxCoeff());
    CBk = CBk * B;
  }
  out.noncausal = out.max_magnitude <= tol;
  return out;
}

}  // namespace ssgc

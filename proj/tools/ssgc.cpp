// ssgc: simulate, fit, gc, experiment and check subcommands.

#include "ssgc/ar.hpp"
#include "ssgc/error.hpp"
#include "ssgc/gc.hpp"
#include "ssgc/harness.hpp"
#include "ssgc/io.hpp"
#include "ssgc/ssid.hpp"
#include "ssgc/ssm.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace ssgc;

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

/// Thrown for flag and path problems found after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_usage(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::ParseError:
    case ErrorCode::InvalidPartition:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidF:
      return true;
    default:
      return false;
  }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SSGC_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("SSGC_SEED must be a nonnegative integer");
  }
  return 1;
}

void require_input(const std::string& path) {
  if (!fs::is_regular_file(path)) throw UsageError("cannot read " + path);
}

void require_output(const std::string& path) {
  const auto parent = fs::absolute(path).parent_path();
  if (!fs::is_directory(parent)) throw UsageError("output directory does not exist: " + parent.string());
}

void emit_json(const io::json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    io::write_json(path, j);
  }
}

IndexList to_zero_based(const std::vector<int>& channels, const char* flag) {
  IndexList out;
  for (int c : channels) {
    if (c < 1) throw UsageError(std::string(flag) + " channels are 1-based");
    out.push_back(c - 1);
  }
  return out;
}

StateSpaceInnovations load_innovations(const std::string& path) {
  return io::as_innovations(io::model_from_json(io::read_json(path)));
}

// simulate -------------------------------------------------------------------

struct SimulateArgs {
  double F = 0.02;
  int r = 0;
  std::size_t T = 1000;
  std::size_t burn_in = 1000;
  double a = 0.9, b = 0.8, f1 = 0.6, f2 = 0.7;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string exact_model;
};

int run_simulate(const SimulateArgs& args) {
  const auto seed = resolve_seed(args.seed);
  require_output(args.out);
  if (!args.exact_model.empty()) require_output(args.exact_model);
  const auto params = make_causal_params(args.F, args.a, args.b);
  const FilterParams filter{args.f1, args.f2, args.r};
  const Matrix Y = simulate(params, filter, args.T, args.burn_in, seed);
  io::json exact;
  if (!args.exact_model.empty()) exact = io::model_to_json(exact_filtered_model(params, filter));
  io::write_csv(args.out, Y, {"y1", "y2"});
  if (!args.exact_model.empty()) io::write_json(args.exact_model, exact);
  return 0;
}

// fit ------------------------------------------------------------------------

struct FitArgs {
  std::string data;
  std::string method = "ar";
  std::string order = "auto";
  std::size_t p_max = 40;
  std::string out;
  std::string report;
};

std::size_t parse_order(const std::string& text) {
  if (text == "auto") return 0;
  try {
    std::size_t used = 0;
    const auto v = std::stoul(text, &used);
    if (used == text.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("--order must be auto or a positive integer");
}

int run_fit(const FitArgs& args) {
  const auto order = parse_order(args.order);
  require_input(args.data);
  require_output(args.out);
  if (!args.report.empty()) require_output(args.report);
  const Matrix Y = io::read_csv(args.data);

  io::json model, report;
  if (args.method == "ar") {
    std::size_t p = order;
    if (p == 0) {
      const auto sel = select_order(Y, args.p_max);
      p = sel.chosen;
      report["order_selection"] = io::order_selection_to_json(sel);
    }
    model = io::model_to_json(fit_ols(Y, p));
    report["method"] = "ar";
    report["order"] = p;
  } else {
    auto config = default_horizons(Y, args.p_max);
    config.order = order;
    const auto res = ssid_cca(Y, config);
    model = io::model_to_json(res.model);
    report["method"] = "ss";
    report["order"] = res.model.m();
    report["past_horizon"] = config.past_horizon;
    report["future_horizon"] = config.future_horizon;
    report["stabilized"] = res.stabilized;
    report["singular_spectrum"] = io::spectrum_to_json(res.spectrum);
  }
  io::write_json(args.out, model);
  emit_json(report, args.report);
  return 0;
}

// gc -------------------------------------------------------------------------

struct GcArgs {
  std::string model;
  std::vector<int> from, to, cond;
  bool spectral = false;
  std::size_t nfreq = 1024;
  std::string out;
};

int run_gc(const GcArgs& args) {
  require_input(args.model);
  if (!args.out.empty()) require_output(args.out);
  if (args.spectral && args.nfreq < 2) throw UsageError("--nfreq must be at least 2");
  const auto model = load_innovations(args.model);
  Partition p = args.cond.empty()
                    ? make_partition(model.n(), to_zero_based(args.to, "--to"), to_zero_based(args.from, "--from"))
                    : Partition{to_zero_based(args.to, "--to"), to_zero_based(args.from, "--from"),
                                to_zero_based(args.cond, "--cond")};
  p.validate(model.n());
  const auto result = gc_time(model, p);
  if (args.spectral) {
    const auto spec = gc_spectral(model, p, frequency_grid(args.nfreq));
    emit_json(io::gc_to_json(result, &spec), args.out);
  } else {
    emit_json(io::gc_to_json(result), args.out);
  }
  return 0;
}

// experiment -----------------------------------------------------------------

struct ExperimentArgs {
  std::string config;
  unsigned jobs = 0;
  std::string outdir;
  std::optional<std::uint64_t> seed;
};

void write_outputs(const fs::path& dir, const ExperimentConfig& config, const ExperimentResult& result) {
  {
    std::ofstream os(dir / "trials.csv", std::ios::binary);
    if (!os) throw Error(ErrorCode::InvalidConfig, "cannot write trials.csv");
    os << io::trials_csv(result.records);
  }
  for (int r : config.r_values) {
    for (auto kind : {ModelKind::Null, ModelKind::Causal}) {
      for (auto est : {Estimator::AR, Estimator::SS}) {
        auto v = result.estimates(r, kind, est);
        std::sort(v.begin(), v.end());
        const Matrix col = Eigen::Map<const Matrix>(v.data(), static_cast<Eigen::Index>(v.size()), 1);
        const auto name = "cdf_" + std::to_string(r) + "_" + to_string(kind) + "_" + to_string(est) + ".csv";
        io::write_csv(dir / name, col, {"gc"});
      }
    }
  }
}

int run_experiment_cmd(const ExperimentArgs& args) {
  ExperimentConfig config;
  io::json raw = io::json::object();
  if (!args.config.empty()) {
    require_input(args.config);
    raw = io::read_json(args.config);
  }
  config = io::config_from_json(raw);
  if (args.seed || !raw.contains("seed")) {
    if (args.seed || std::getenv("SSGC_SEED")) config.seed = resolve_seed(args.seed);
  }
  const fs::path dir(args.outdir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw UsageError("cannot create output directory " + dir.string());

  const unsigned jobs = args.jobs > 0 ? args.jobs : std::max(1u, std::thread::hardware_concurrency());
  std::size_t last_pct = 0, seen = 0;
  const auto progress = [&](std::size_t done, std::size_t total) {
    if (done <= seen) return;
    seen = done;
    const auto pct = done * 100 / std::max<std::size_t>(total, 1);
    if (pct != last_pct || done == total) {
      last_pct = pct;
      std::fprintf(stderr, "\rexperiment: %zu/%zu trials (%zu%%)", done, total, pct);
      if (done == total) std::fputc('\n', stderr);
    }
  };

  ExperimentResult result;
  int status = 0;
  std::string failure;
  try {
    result = run_experiment(config, jobs, progress);
  } catch (const std::exception& e) {
    failure = e.what();
    status = kRuntimeFailure;
  }
  const auto failed = static_cast<std::size_t>(
      std::count_if(result.records.begin(), result.records.end(), [](const auto& r) { return !r.ok(); }));
  io::json summary = io::summary_to_json(config, result.summary, failed);
  if (!failure.empty()) summary["error"] = failure;
  io::write_json(dir / "summary.json", summary);
  if (status == 0) write_outputs(dir, config, result);
  if (!failure.empty()) std::cerr << "error: " << failure << '\n';
  std::cerr << "experiment: " << result.records.size() << " records, " << failed << " failed; wrote "
            << dir.string() << '\n';
  return status;
}

// check ----------------------------------------------------------------------

int run_check(const std::string& path) {
  require_input(path);
  const auto any = io::model_from_json(io::read_json(path));
  ValidationReport report;
  std::optional<StateSpaceInnovations> innovations;
  if (const auto* g = std::get_if<StateSpaceGeneral>(&any)) {
    report = validate(*g);
  } else {
    if (std::holds_alternative<ArModel>(any)) std::cout << "embedding: companion\n";
    innovations = io::as_innovations(any);
    report = validate(*innovations);
  }
  for (const auto& c : report.checks) {
    std::cout << c.name << ": " << (c.pass ? "PASS" : "FAIL") << " (" << io::format_double(c.value) << ")\n";
  }
  if (!report.ok()) return kRuntimeFailure;
  if (!innovations) innovations = io::as_innovations(any);
  const auto n = innovations->n();
  for (Eigen::Index to = 0; to < n; ++to) {
    for (Eigen::Index from = 0; from < n; ++from) {
      if (to == from) continue;
      const auto nc = noncausality_check(*innovations, make_partition(n, {to}, {from}));
      std::cout << "noncausal " << from + 1 << " -> " << to + 1 << ": " << (nc.noncausal ? "yes" : "no")
                << " (" << io::format_double(nc.max_magnitude) << ")\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"State space Granger causality"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate the filtered minimal VAR to CSV");
  simulate_cmd->add_option("--F", sim.F, "Causality y2 -> y1 in nats")->capture_default_str();
  simulate_cmd->add_option("--r", sim.r, "Binomial filter order")->capture_default_str()->check(CLI::NonNegativeNumber);
  simulate_cmd->add_option("--T", sim.T, "Samples")->capture_default_str()->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--burn-in", sim.burn_in, "Discarded samples")->capture_default_str();
  simulate_cmd->add_option("--a", sim.a)->capture_default_str();
  simulate_cmd->add_option("--b", sim.b)->capture_default_str();
  simulate_cmd->add_option("--f1", sim.f1)->capture_default_str();
  simulate_cmd->add_option("--f2", sim.f2)->capture_default_str();
  simulate_cmd->add_option("--seed", sim.seed, "Seed (falls back to SSGC_SEED, then 1)");
  simulate_cmd->add_option("--out", sim.out, "Output CSV")->required();
  simulate_cmd->add_option("--exact-model", sim.exact_model, "Also write the generating model as innovations JSON");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit an AR or state space model to CSV data");
  fit_cmd->add_option("--data", fit.data, "Input CSV")->required();
  fit_cmd->add_option("--method", fit.method)->capture_default_str()->check(CLI::IsMember({"ar", "ss"}));
  fit_cmd->add_option("--order", fit.order, "auto or a fixed order")->capture_default_str();
  fit_cmd->add_option("--p-max", fit.p_max, "Largest AR order searched")->capture_default_str()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--out", fit.out, "Output model JSON")->required();
  fit_cmd->add_option("--report", fit.report, "Order-selection report JSON (default stdout)");

  GcArgs gc;
  auto* gc_cmd = app.add_subcommand("gc", "Granger causality from a model JSON");
  gc_cmd->add_option("--model", gc.model, "Model JSON")->required();
  gc_cmd->add_option("--from", gc.from, "Source channels (1-based)")->required()->delimiter(',');
  gc_cmd->add_option("--to", gc.to, "Target channels (1-based)")->required()->delimiter(',');
  gc_cmd->add_option("--cond", gc.cond, "Conditioning channels (default: all others)")->delimiter(',');
  gc_cmd->add_flag("--spectral", gc.spectral, "Add the spectral decomposition");
  gc_cmd->add_option("--nfreq", gc.nfreq, "Frequency points on [0, pi]")->capture_default_str();
  gc_cmd->add_option("--out", gc.out, "Output JSON (default stdout)");

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("experiment", "AR vs SS Monte Carlo comparison");
  exp_cmd->add_option("--config", exp.config, "Experiment config JSON (default: desk scale)");
  exp_cmd->add_option("--jobs", exp.jobs, "Parallel replications (0: all cores)")->capture_default_str();
  exp_cmd->add_option("--outdir", exp.outdir, "Output directory")->required();
  exp_cmd->add_option("--seed", exp.seed, "Master seed (overrides the config)");

  std::string check_model;
  auto* check_cmd = app.add_subcommand("check", "Validate a model JSON");
  check_cmd->add_option("--model", check_model, "Model JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*simulate_cmd) return run_simulate(sim);
    if (*fit_cmd) return run_fit(fit);
    if (*gc_cmd) return run_gc(gc);
    if (*exp_cmd) return run_experiment_cmd(exp);
    if (*check_cmd) return run_check(check_model);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_usage(e.code()) ? kUsageError : kRuntimeFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kUsageError;
}

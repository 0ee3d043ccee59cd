#include "ssgc/io.hpp"

#include "ssgc/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace ssgc::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) parse_error(std::string("missing field \"") + name + "\"");
  return j.at(name);
}

Eigen::Index get_dim(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    parse_error(std::string("field \"") + name + "\" must be a nonnegative integer");
  }
  return static_cast<Eigen::Index>(v.get<long long>());
}

Matrix sized_matrix(const json& j, const char* name, Eigen::Index rows, Eigen::Index cols) {
  Matrix M = matrix_from_json(field(j, name), name);
  if (M.rows() == 0 && rows == 0) return Matrix(0, cols);
  if (M.cols() == 0 && cols == 0 && M.rows() == rows) return Matrix(rows, 0);
  if (M.rows() != rows || M.cols() != cols) {
    std::ostringstream os;
    os << name << " is " << M.rows() << "x" << M.cols() << ", expected " << rows << "x" << cols;
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  return M;
}

json index_list(const IndexList& idx) {
  json a = json::array();
  for (auto i : idx) a.push_back(i + 1);
  return a;
}

IndexList index_list_from(const json& j, const char* name) {
  IndexList out;
  if (!j.is_array()) parse_error(std::string(name) + " must be an array of 1-based indices");
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<long long>() < 1) parse_error(std::string(name) + " indices must be >= 1");
    out.push_back(static_cast<Eigen::Index>(v.get<long long>() - 1));
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(n));
}

json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const char* name) {
  if (!j.is_array()) parse_error(std::string(name) + " must be a row-major nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) parse_error(std::string(name) + " rows must be arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      parse_error(std::string(name) + " is ragged");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) parse_error(std::string(name) + " entries must be numbers");
      M(i, k) = v.get<double>();
      if (!std::isfinite(M(i, k))) parse_error(std::string(name) + " entries must be finite");
    }
  }
  return M;
}

json model_to_json(const StateSpaceGeneral& model) {
  json j;
  j["type"] = "ss_general";
  j["m"] = model.m();
  j["n"] = model.n();
  j["A"] = matrix_to_json(model.A);
  j["C"] = matrix_to_json(model.C);
  j["Q"] = matrix_to_json(model.Q);
  j["R"] = matrix_to_json(model.R);
  j["S"] = matrix_to_json(model.S);
  return j;
}

json model_to_json(const StateSpaceInnovations& model) {
  json j;
  j["type"] = "ss_innovations";
  j["m"] = model.m();
  j["n"] = model.n();
  j["A"] = matrix_to_json(model.A);
  j["C"] = matrix_to_json(model.C);
  j["K"] = matrix_to_json(model.K);
  j["Sigma"] = matrix_to_json(model.Sigma);
  return j;
}

json model_to_json(const ArModel& model) {
  json j;
  j["type"] = "ar";
  j["p"] = model.p();
  j["n"] = model.n();
  json coeffs = json::array();
  for (const auto& A : model.coeffs) coeffs.push_back(matrix_to_json(A));
  j["coeffs"] = std::move(coeffs);
  j["sigma"] = matrix_to_json(model.SigmaEps);
  return j;
}

json model_to_json(const AnyModel& model) {
  return std::visit([](const auto& m) { return model_to_json(m); }, model);
}

AnyModel model_from_json(const json& j) {
  const auto& type = field(j, "type");
  if (!type.is_string()) parse_error("\"type\" must be a string");
  const auto t = type.get<std::string>();
  if (t == "ss_innovations") {
    const auto m = get_dim(j, "m");
    const auto n = get_dim(j, "n");
    StateSpaceInnovations model{sized_matrix(j, "A", m, m), sized_matrix(j, "C", n, m),
                                sized_matrix(j, "K", m, n), sized_matrix(j, "Sigma", n, n)};
    check_dimensions(model);
    return model;
  }
  if (t == "ss_general") {
    const auto m = get_dim(j, "m");
    const auto n = get_dim(j, "n");
    StateSpaceGeneral model{sized_matrix(j, "A", m, m), sized_matrix(j, "C", n, m),
                            sized_matrix(j, "Q", m, m), sized_matrix(j, "R", n, n),
                            sized_matrix(j, "S", m, n)};
    check_dimensions(model);
    return model;
  }
  if (t == "ar") {
    const auto p = get_dim(j, "p");
    if (p < 1) parse_error("AR order must be at least 1");
    ArModel model;
    model.SigmaEps = matrix_from_json(field(j, "sigma"), "sigma");
    const auto n = model.SigmaEps.rows();
    if (n < 1 || model.SigmaEps.cols() != n) throw Error(ErrorCode::DimensionMismatch, "sigma must be square");
    if (j.contains("n") && get_dim(j, "n") != n) throw Error(ErrorCode::DimensionMismatch, "n does not match sigma");
    const auto& coeffs = field(j, "coeffs");
    // Either a list of p n x n matrices or the n x (p n) block row [A_1 ... A_p].
    const bool nested = coeffs.is_array() && !coeffs.empty() && coeffs[0].is_array() &&
                        !coeffs[0].empty() && coeffs[0][0].is_array();
    if (nested) {
      if (static_cast<Eigen::Index>(coeffs.size()) != p) throw Error(ErrorCode::DimensionMismatch, "coeffs length must equal p");
      for (const auto& c : coeffs) {
        Matrix A = matrix_from_json(c, "coeffs");
        if (A.rows() != n || A.cols() != n) throw Error(ErrorCode::DimensionMismatch, "coefficient must be n x n");
        model.coeffs.push_back(std::move(A));
      }
    } else {
      const Matrix block = matrix_from_json(coeffs, "coeffs");
      if (block.rows() != n || block.cols() != p * n) {
        throw Error(ErrorCode::DimensionMismatch, "coeffs must be n x (p n)");
      }
      for (Eigen::Index l = 0; l < p; ++l) model.coeffs.push_back(block.middleCols(l * n, n));
    }
    return model;
  }
  parse_error("unknown model type \"" + t + "\"");
}

StateSpaceInnovations as_innovations(const AnyModel& model) {
  if (const auto* g = std::get_if<StateSpaceGeneral>(&model)) return to_innovations(*g);
  if (const auto* a = std::get_if<ArModel>(&model)) return ar_to_ss(*a);
  return std::get<StateSpaceInnovations>(model);
}

json partition_to_json(const Partition& p) {
  json j;
  j["target"] = index_list(p.target);
  j["source"] = index_list(p.source);
  j["cond"] = index_list(p.cond);
  return j;
}

Partition partition_from_json(const json& j, Eigen::Index n) {
  Partition p{index_list_from(field(j, "target"), "target"), index_list_from(field(j, "source"), "source"),
              j.contains("cond") ? index_list_from(j.at("cond"), "cond") : IndexList{}};
  p.validate(n);
  return p;
}

json gc_to_json(const GcResult& result, const GcSpectrum* spectrum) {
  json j;
  j["value"] = result.value;
  j["partition"] = partition_to_json(result.partition);
  if (spectrum) {
    json s;
    s["omega"] = spectrum->frequencies;
    s["f"] = spectrum->values;
    const double integral = spectrum->integral();
    s["integral"] = integral;
    s["discrepancy"] = std::abs(integral - result.value);
    s["negative"] = spectrum->negative;
    j["spectral"] = std::move(s);
  }
  json d;
  d["reduced_residual"] = result.diagnostics.reduced_residual;
  d["det_sigma11"] = result.diagnostics.det_sigma11;
  d["det_sigma_r11"] = result.diagnostics.det_sigma_r11;
  d["negative"] = result.diagnostics.negative;
  j["diagnostics"] = std::move(d);
  return j;
}

json gamma_to_json(const GammaFit& fit) {
  json j;
  j["k"] = fit.shape;
  j["theta"] = fit.scale;
  j["n_used"] = fit.n_used;
  j["excluded"] = fit.n_excluded;
  j["log_likelihood"] = fit.log_likelihood;
  return j;
}

json report_to_json(const PowerBiasReport& report) {
  json j;
  j["alpha"] = report.alpha;
  j["F_crit"] = report.F_crit;
  j["power"] = report.power;
  j["bias"] = report.bias;
  j["source"] = report.source == PowerSource::Empirical ? "empirical" : "gamma";
  if (report.source == PowerSource::Gamma) {
    j["gamma_null"] = gamma_to_json(report.gamma_null);
    j["gamma_causal"] = gamma_to_json(report.gamma_causal);
  }
  j["excluded"] = report.excluded;
  return j;
}

json spectrum_to_json(const SingularSpectrum& s) {
  json j;
  j["sigma2"] = s.sigma2;
  j["sdc"] = s.sdc;
  j["svc"] = s.svc;
  j["chosen_m"] = s.chosen_m;
  j["criterion"] = s.used == OrderCriterion::SDC ? "sdc" : "svc";
  return j;
}

json order_selection_to_json(const OrderSelection& s) {
  json j;
  j["logdet"] = s.logdet;
  j["aic"] = s.aic;
  j["bic"] = s.bic;
  j["chosen"] = s.chosen;
  j["aic_chosen"] = s.aic_chosen;
  j["T_eff"] = s.T_eff;
  return j;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["T"] = c.T;
  j["n_trials"] = c.n_trials;
  j["r_values"] = c.r_values;
  j["F"] = c.F;
  j["alpha"] = c.alpha;
  j["seed"] = c.seed;
  j["burn_in"] = c.burn_in;
  j["a"] = c.a;
  j["b"] = c.b;
  j["f1"] = c.f1;
  j["f2"] = c.f2;
  j["p_max"] = c.p_max;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) parse_error("experiment config must be a JSON object");
  static const std::set<std::string> known = {"T", "n_trials", "r_values", "F", "alpha", "seed",
                                              "burn_in", "a", "b", "f1", "f2", "p_max"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw Error(ErrorCode::InvalidConfig, "unknown config key \"" + key + "\"");
  }
  ExperimentConfig c;
  auto count = [&](const char* key, std::size_t& dst) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be a nonnegative integer");
    }
    dst = v.get<std::size_t>();
  };
  auto real = [&](const char* key, double& dst) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number()) throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be a number");
    dst = j.at(key).get<double>();
  };
  count("T", c.T);
  count("n_trials", c.n_trials);
  count("burn_in", c.burn_in);
  count("p_max", c.p_max);
  real("F", c.F);
  real("alpha", c.alpha);
  real("a", c.a);
  real("b", c.b);
  real("f1", c.f1);
  real("f2", c.f2);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer()) throw Error(ErrorCode::InvalidConfig, "seed must be an integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("r_values")) {
    const auto& rv = j.at("r_values");
    if (!rv.is_array()) throw Error(ErrorCode::InvalidConfig, "r_values must be an array");
    c.r_values.clear();
    for (const auto& v : rv) {
      if (!v.is_number_integer()) throw Error(ErrorCode::InvalidConfig, "r_values must be integers");
      c.r_values.push_back(v.get<int>());
    }
  }
  c.validate();
  return c;
}

namespace {

json estimator_summary_json(const EstimatorSummary& s) {
  json j;
  j["median_order"] = s.median_order;
  j["failures_null"] = s.failures_null;
  j["failures_causal"] = s.failures_causal;
  j["mean_null"] = s.mean_null;
  j["mean_causal"] = s.mean_causal;
  j["empirical"] = report_to_json(s.empirical);
  if (s.gamma_ok) {
    j["gamma"] = report_to_json(s.gamma);
    j["ks_null"] = s.ks_null;
    j["ks_causal"] = s.ks_causal;
    j["null_rejection_at_gamma_crit"] = s.null_rejection_at_gamma_crit;
  } else {
    j["gamma_error"] = s.gamma_error;
  }
  return j;
}

}  // namespace

json summary_to_json(const ExperimentConfig& config, const std::vector<RSummary>& summary,
                     std::size_t failures) {
  json j;
  j["config"] = config_to_json(config);
  j["failures"] = failures;
  json per_r = json::array();
  for (const auto& s : summary) {
    json e;
    e["r"] = s.r;
    e["ar"] = estimator_summary_json(s.ar);
    e["ss"] = estimator_summary_json(s.ss);
    per_r.push_back(std::move(e));
  }
  j["per_r"] = std::move(per_r);
  return j;
}

std::string format_csv(const Matrix& data, const std::vector<std::string>& header) {
  if (static_cast<Eigen::Index>(header.size()) != data.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "CSV header width must match data columns");
  }
  std::string out;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) out += ',';
    out += header[k];
  }
  out += '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index k = 0; k < data.cols(); ++k) {
      if (k) out += ',';
      out += format_double(data(i, k));
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const Matrix& data,
               const std::vector<std::string>& header) {
  const auto text = format_csv(data, header);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::InvalidConfig, "cannot write " + path.string());
  os << text;
}

Matrix parse_csv(const std::string& text, std::vector<std::string>* header) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) parse_error("empty CSV");
  std::vector<std::string> names;
  {
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      names.push_back(cell);
    }
  }
  if (names.empty()) parse_error("CSV header is empty");
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t cols = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      const char* comma = std::find(p, end, ',');
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(p, comma, v);
      if (ec != std::errc() || ptr != comma || !std::isfinite(v)) {
        parse_error("non-numeric CSV cell on data row " + std::to_string(rows + 1));
      }
      values.push_back(v);
      ++cols;
      if (comma == end) break;
      p = comma + 1;
    }
    if (cols != names.size()) parse_error("CSV row " + std::to_string(rows + 1) + " has wrong width");
    ++rows;
  }
  Matrix M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < names.size(); ++k) {
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = values[i * names.size() + k];
    }
  }
  if (header) *header = std::move(names);
  return M;
}

Matrix read_csv(const std::filesystem::path& path, std::vector<std::string>* header) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::ParseError, "cannot read " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_csv(ss.str(), header);
}

std::string trials_csv(const std::vector<TrialRecord>& records) {
  std::string out = "r,model_kind,estimator,chosen_order,gc_estimate,seed,trial,error\n";
  for (const auto& rec : records) {
    std::string error = rec.error;
    std::replace_if(error.begin(), error.end(), [](char ch) { return ch == ',' || ch == '\n' || ch == '\r'; }, ';');
    out += std::to_string(rec.r) + ',' + to_string(rec.kind) + ',' + to_string(rec.estimator) + ',' +
           std::to_string(rec.chosen_order) + ',' + (rec.ok() ? format_double(rec.gc_estimate) : "nan") +
           ',' + std::to_string(rec.seed) + ',' + std::to_string(rec.trial) + ',' + error + '\n';
  }
  return out;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::ParseError, "cannot read " + path.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::InvalidConfig, "cannot write " + path.string());
  os << j.dump(2) << '\n';
}

}  // namespace ssgc::io

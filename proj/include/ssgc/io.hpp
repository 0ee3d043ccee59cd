#pragma once

// File formats: model JSON ("ss_general", "ss_innovations", "ar"), GC result
// JSON, power/bias report JSON, experiment config/summary JSON and CSV series.
// Channel indices are 1-based in every file.

#include "ssgc/ar.hpp"
#include "ssgc/gc.hpp"
#include "ssgc/harness.hpp"
#include "ssgc/ssid.hpp"
#include "ssgc/ssm.hpp"
#include "ssgc/stats.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace ssgc::io {

using json = nlohmann::ordered_json;

using AnyModel = std::variant<StateSpaceGeneral, StateSpaceInnovations, ArModel>;

json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const json& j, const char* name);

json model_to_json(const StateSpaceGeneral& model);
json model_to_json(const StateSpaceInnovations& model);
json model_to_json(const ArModel& model);
json model_to_json(const AnyModel& model);

/// Throws ParseError on schema violations, DimensionMismatch on inconsistent shapes.
AnyModel model_from_json(const json& j);

/// Innovations form of any supported model (DARE for general form,
/// companion embedding for AR).
StateSpaceInnovations as_innovations(const AnyModel& model);

json partition_to_json(const Partition& p);
Partition partition_from_json(const json& j, Eigen::Index n);

json gc_to_json(const GcResult& result, const GcSpectrum* spectrum = nullptr);

json gamma_to_json(const GammaFit& fit);
json report_to_json(const PowerBiasReport& report);

json spectrum_to_json(const SingularSpectrum& s);
json order_selection_to_json(const OrderSelection& s);

json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const json& j);

json summary_to_json(const ExperimentConfig& config, const std::vector<RSummary>& summary,
                     std::size_t failures);

/// CSV with a header row; values written with 17 significant digits.
void write_csv(const std::filesystem::path& path, const Matrix& data,
               const std::vector<std::string>& header);
std::string format_csv(const Matrix& data, const std::vector<std::string>& header);
Matrix read_csv(const std::filesystem::path& path, std::vector<std::string>* header = nullptr);
Matrix parse_csv(const std::string& text, std::vector<std::string>* header = nullptr);

std::string trials_csv(const std::vector<TrialRecord>& records);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

std::string format_double(double x);

}  // namespace ssgc::io

#pragma once

// Versioned JSON file formats for process matrices, constraint reports,
// Kraus listings and experiment records.  Complex numbers serialize as
// [re, im] pairs, matrices row-major; the mapping from the one-based basis
// numbering in prose to zero-based array indices is fixed here.

#include <map>

#include "json.hpp"
#include "qpt/experiment.hpp"

namespace qpt {

using Provenance = std::map<std::string, std::string>;

inline constexpr int kSchemaVersion = 1;

struct ChiFile {
    ProcessMatrix chi;
    Provenance provenance;
};

struct ReportFile {
    ConstraintReport report;
    std::vector<std::string> verdicts;  // regenerated from the machine fields
};

struct ExperimentFile {
    ExperimentRecord record;
    Provenance provenance;
};

nlohmann::json to_json(const Mat2& m);
Mat2 mat2_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Mat4& m);
Mat4 mat4_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ChiFile& file);
ChiFile chi_file_from_json(const nlohmann::json& j);

std::vector<std::string> verdict_lines(const ConstraintReport& report);
nlohmann::json to_json(const ReportFile& file);
ReportFile report_file_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ExperimentFile& file);
ExperimentFile experiment_file_from_json(const nlohmann::json& j);

nlohmann::json to_json(const KrausSet& set, double completeness_residual);

// Throws io_error when the file cannot be opened; JSON syntax errors
// propagate as nlohmann::json::parse_error.
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace qpt

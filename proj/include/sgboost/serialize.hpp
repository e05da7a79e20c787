#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sgboost/boost.hpp"
#include "sgboost/data_model.hpp"
#include "sgboost/interpret.hpp"
#include "sgboost/pipeline.hpp"
#include "sgboost/tuning.hpp"

namespace sgboost {

using Json = nlohmann::ordered_json;

Json schema_to_json(const DatasetSchema& schema);
DatasetSchema schema_from_json(const Json& j);
DatasetSchema read_schema(const std::filesystem::path& path);

/// FNV-1a 64 of the canonical schema document, as 16 hex digits.
std::string schema_fingerprint(const DatasetSchema& schema);

Json fit_to_json(const BoostFit& fit);
BoostFit fit_from_json(const Json& j);

/// Everything needed to rebuild a fitted model's outputs from the data.
struct RunConfig {
    ModelOptions model;
    double train_fraction = 0.7;
    std::string data_path;
    std::string schema_path;
    std::string output_dir;
};

Json run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const Json& j);

struct ModelArtifact {
    std::string software_version;
    std::string fingerprint;
    DatasetSchema schema;
    RunConfig config;
    Split split;
    std::vector<StageSummary> stages;
    BoostFit fit;
    double test_auc = 0.5;
};

inline constexpr std::string_view kArtifactFormat = "sgboost-model";
inline constexpr int kArtifactVersion = 1;

Json artifact_to_json(const ModelArtifact& artifact);
/// Throws Parse on malformed documents and FingerprintMismatch when the
/// stored fingerprint does not match the stored schema.
ModelArtifact artifact_from_json(const Json& j);
ModelArtifact read_artifact(const std::filesystem::path& path);

/// Shortest decimal that round-trips the double.
std::string format_double(double v);

/// Writes to a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string importance_csv(const ImportanceTable& table);
std::string roc_csv(const RocCurve& roc);
std::string odds_ratios_csv(const std::vector<OddsRatio>& rows);
std::string partial_effects_csv(const std::vector<PartialEffectGrid>& grids);
std::string selection_path_csv(const BoostFit& fit);
std::string probe_csv(const std::vector<ProbeResult>& results);

/// Parses the rows of roc.csv back (the "# auc=" header line is returned
/// through auc).
std::vector<RocPoint> parse_roc_csv(std::string_view text, double& auc);

}  // namespace sgboost

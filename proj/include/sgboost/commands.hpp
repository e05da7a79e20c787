#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sgboost/serialize.hpp"
#include "sgboost/synth.hpp"

namespace sgboost {

std::string software_version();

/// Checks model-specific settings (alpha only with sgb, ranges) before any
/// file is read or written.
void validate_run_config(const RunConfig& config, bool alpha_given);

/// Split, CV-tune, fit on the training rows, evaluate on the test rows.
/// Writes model.json, the reports and manifest.json into output_dir only
/// after every computation succeeded.
ModelArtifact cmd_fit(const RunConfig& config, bool alpha_given = false);

/// Regenerates the reports of an artifact from the data it was fitted on.
/// With schema_path, the schema's fingerprint must match the artifact's.
void cmd_report(const std::filesystem::path& artifact_path, const std::filesystem::path& data_path,
                const std::filesystem::path& output_dir,
                const std::optional<std::filesystem::path>& schema_path = std::nullopt);

struct ProbeRequest {
    std::filesystem::path data_path;
    std::filesystem::path schema_path;
    std::filesystem::path output;
    /// "moderator:partner"; empty means every interaction pair of the schema
    /// between non-continuous variables.
    std::vector<std::string> terms;
    std::optional<std::string> strata_column;
    bool main_effects = true;
};

void cmd_probe(const ProbeRequest& request);

/// Writes the generated table and its schema (plus the true probabilities
/// when truth_path is set).
void cmd_synth(const SynthSpec& spec, const std::filesystem::path& data_path,
               const std::filesystem::path& schema_path,
               const std::optional<std::filesystem::path>& truth_path = std::nullopt);

/// cv_curve.csv with the fold-mean out-of-fold risk per stage and iteration.
void cmd_cv_curve(const RunConfig& config, bool alpha_given = false);

/// The report files of a fitted model, keyed by file name.
std::vector<std::pair<std::string, std::string>> render_reports(const ModelArtifact& artifact,
                                                                const Prepared& data);

}  // namespace sgboost

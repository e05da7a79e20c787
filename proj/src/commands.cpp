#include "sgboost/commands.hpp"

#include <algorithm>

#include "sgboost/error.hpp"
#include "sgboost/interpret.hpp"

namespace sgboost {

namespace fs = std::filesystem;

std::string software_version() { return SGBOOST_VERSION; }

void validate_run_config(const RunConfig& config, bool alpha_given) {
    if (alpha_given && config.model.model != ModelKind::sgb) {
        fail(ErrorCode::InvalidArgument, "--alpha applies only to model sgb, not " +
                                             std::string(to_string(config.model.model)));
    }
    config.model.validate();
    if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
        fail(ErrorCode::InvalidArgument, "train fraction must lie in (0, 1)");
    }
    if (config.data_path.empty() || config.schema_path.empty()) {
        fail(ErrorCode::InvalidArgument, "data and schema paths are required");
    }
}

namespace {

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        fail(ErrorCode::Io, "cannot create output directory '" + dir.string() + "'");
    }
}

std::string fnv_hex(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h = (h ^ c) * 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool has_interactions(const BoostFit& fit) {
    return std::any_of(fit.learners.begin(), fit.learners.end(),
                       [](const FittedLearner& l) { return l.kind == LearnerKind::interaction; });
}

void check_split(const Split& s, Index rows) {
    for (const auto* part : {&s.train, &s.test}) {
        for (Index i : *part) {
            if (i < 0 || i >= rows) {
                fail(ErrorCode::ColumnMismatch, "artifact split refers to row " + std::to_string(i) +
                                                    " but the data has " + std::to_string(rows) +
                                                    " rows");
            }
        }
    }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> render_reports(const ModelArtifact& artifact,
                                                                const Prepared& data) {
    check_split(artifact.split, data.design.rows());
    const auto& fit = artifact.fit;
    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("importance.csv", importance_csv(importance(fit)));

    const auto test_design = data.design.subset(artifact.split.test);
    const auto test_y = data.outcome.subset(artifact.split.test);
    const Eigen::VectorXd scores = predict(fit, test_design);
    files.emplace_back("roc.csv",
                       roc_csv(roc_auc(std::span<const double>(scores.data(),
                                                               static_cast<std::size_t>(scores.size())),
                                       test_y)));
    files.emplace_back("odds_ratios.csv", odds_ratios_csv(odds_ratios(fit)));

    const auto train_design = data.design.subset(artifact.split.train);
    std::vector<PartialEffectGrid> grids;
    for (const auto& l : fit.learners) {
        if (l.selected()) {
            grids.push_back(partial_effects(fit, train_design, l.id));
        }
    }
    files.emplace_back("partial_effects.csv", partial_effects_csv(grids));
    files.emplace_back("selection_path.csv", selection_path_csv(fit));
    return files;
}

namespace {

void write_outputs(const fs::path& dir,
                   const std::vector<std::pair<std::string, std::string>>& files,
                   const Json& manifest_base) {
    ensure_dir(dir);
    Json manifest = manifest_base;
    Json listing = Json::array();
    for (const auto& [name, text] : files) {
        write_file_atomic(dir / name, text);
        listing.push_back({{"file", name}, {"fnv1a64", fnv_hex(text)}});
    }
    manifest["outputs"] = std::move(listing);
    write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

struct Loaded {
    DatasetSchema schema;
    Prepared data;
};

Loaded load(const RunConfig& config) {
    Loaded out;
    out.schema = read_schema(config.schema_path);
    const Table raw = read_csv(config.data_path);
    out.data = prepare(out.schema, raw, uses_interactions(config.model.model));
    return out;
}

}  // namespace

ModelArtifact cmd_fit(const RunConfig& config, bool alpha_given) {
    validate_run_config(config, alpha_given);
    if (config.output_dir.empty()) {
        fail(ErrorCode::InvalidArgument, "an output directory is required");
    }
    const auto loaded = load(config);
    const auto ex = run_experiment(loaded.data, loaded.schema, config.model, config.train_fraction);

    ModelArtifact a;
    a.software_version = software_version();
    a.fingerprint = schema_fingerprint(loaded.schema);
    a.schema = loaded.schema;
    a.config = config;
    a.split = ex.split;
    a.stages = ex.model.stages;
    a.fit = ex.model.fit;
    a.test_auc = ex.test_roc.auc;

    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("model.json", artifact_to_json(a).dump(2) + "\n");
    for (auto& f : render_reports(a, loaded.data)) {
        files.push_back(std::move(f));
    }
    Json manifest;
    manifest["command"] = "fit";
    manifest["software_version"] = a.software_version;
    manifest["config"] = run_config_to_json(config);
    manifest["fingerprint"] = a.fingerprint;
    write_outputs(config.output_dir, files, manifest);
    return a;
}

void cmd_report(const fs::path& artifact_path, const fs::path& data_path, const fs::path& output_dir,
                const std::optional<fs::path>& schema_path) {
    const ModelArtifact a = read_artifact(artifact_path);
    if (schema_path) {
        const auto fp = schema_fingerprint(read_schema(*schema_path));
        if (fp != a.fingerprint) {
            fail(ErrorCode::FingerprintMismatch, "schema fingerprint " + fp +
                                                     " does not match the artifact's " + a.fingerprint);
        }
    }
    const Table raw = read_csv(data_path);
    const Prepared data = prepare(a.schema, raw, has_interactions(a.fit));
    const auto files = render_reports(a, data);
    Json manifest;
    manifest["command"] = "report";
    manifest["software_version"] = software_version();
    manifest["artifact"] = artifact_path.string();
    manifest["data"] = data_path.string();
    manifest["fingerprint"] = a.fingerprint;
    write_outputs(output_dir, files, manifest);
}

void cmd_probe(const ProbeRequest& request) {
    const DatasetSchema schema = read_schema(request.schema_path);
    const Table raw = read_csv(request.data_path);
    std::vector<std::pair<std::string, std::string>> pairs;
    if (request.terms.empty()) {
        for (const auto& pr : interaction_pairs(schema)) {
            if (schema.variable(pr.first).kind != VariableKind::continuous &&
                schema.variable(pr.second).kind != VariableKind::continuous) {
                pairs.push_back(pr);
            }
        }
    } else {
        for (const auto& t : request.terms) {
            const auto colon = t.find(':');
            if (colon == std::string::npos) {
                fail(ErrorCode::InvalidArgument, "term '" + t + "' must look like moderator:partner");
            }
            pairs.emplace_back(t.substr(0, colon), t.substr(colon + 1));
        }
    }
    ProbeOptions options;
    options.main_effects = request.main_effects;
    std::vector<ProbeResult> results;
    for (const auto& [m, p] : pairs) {
        results.push_back(interaction_probe(raw, schema, m, p, request.strata_column, options));
    }
    const std::string text = probe_csv(results);
    if (!request.output.parent_path().empty()) {
        ensure_dir(request.output.parent_path());
    }
    write_file_atomic(request.output, text);
}

void cmd_synth(const SynthSpec& spec, const fs::path& data_path, const fs::path& schema_path,
               const std::optional<fs::path>& truth_path) {
    const SynthData d = generate(spec);
    std::ostringstream csv;
    write_csv(csv, d.table);
    for (const auto* p : {&data_path, &schema_path}) {
        if (!p->parent_path().empty()) {
            ensure_dir(p->parent_path());
        }
    }
    write_file_atomic(data_path, csv.str());
    write_file_atomic(schema_path, schema_to_json(spec.schema).dump(2) + "\n");
    if (truth_path) {
        std::string text = "row,eta,probability\n";
        for (Index i = 0; i < d.eta.size(); ++i) {
            text += std::to_string(i + 1) + "," + format_double(d.eta(i)) + "," +
                    format_double(d.probability(i)) + "\n";
        }
        write_file_atomic(*truth_path, text);
    }
}

void cmd_cv_curve(const RunConfig& config, bool alpha_given) {
    validate_run_config(config, alpha_given);
    if (config.output_dir.empty()) {
        fail(ErrorCode::InvalidArgument, "an output directory is required");
    }
    const auto loaded = load(config);
    SplitSpec spec;
    spec.train_fraction = config.train_fraction;
    spec.seed = config.model.seed;
    const auto s = split(loaded.data.outcome, spec);
    const auto model = train_model(loaded.data.design.subset(s.train),
                                   loaded.data.outcome.subset(s.train), loaded.schema, config.model);
    std::string text = "stage,name,m,mean_risk\n";
    for (std::size_t k = 0; k < model.stages.size(); ++k) {
        const auto& st = model.stages[k];
        for (Index m = 0; m < st.cv_mean_risk.size(); ++m) {
            text += std::to_string(k) + "," + csv_escape(st.name) + "," + std::to_string(m) + "," +
                    format_double(st.cv_mean_risk(m)) + "\n";
        }
    }
    Json manifest;
    manifest["command"] = "cv-curve";
    manifest["software_version"] = software_version();
    manifest["config"] = run_config_to_json(config);
    Json stars = Json::array();
    for (const auto& st : model.stages) {
        stars.push_back({{"stage", st.name}, {"m_star", st.m_star}});
    }
    manifest["m_star"] = std::move(stars);
    write_outputs(config.output_dir, {{"cv_curve.csv", text}}, manifest);
}

}  // namespace sgboost

#include "sgboost/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "sgboost/error.hpp"
#include "sgboost/table.hpp"

namespace sgboost {

namespace fs = std::filesystem;

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) {
        fail(ErrorCode::Io, "cannot format number");
    }
    return std::string(buf, end);
}

// ---------------------------------------------------------------------------
// Schema

Json schema_to_json(const DatasetSchema& schema) {
    Json j;
    j["outcome"] = {{"name", schema.outcome.name},
                    {"positive", schema.outcome.positive},
                    {"negative", schema.outcome.negative}};
    Json vars = Json::array();
    for (const auto& v : schema.variables) {
        vars.push_back({{"name", v.name},
                        {"kind", std::string(to_string(v.kind))},
                        {"categories", v.categories},
                        {"group", v.group},
                        {"moderator", v.is_moderator}});
    }
    j["variables"] = std::move(vars);
    return j;
}

namespace {

template <class F>
auto guarded(std::string_view what, F&& f) {
    try {
        return f();
    } catch (const Json::exception& e) {
        fail(ErrorCode::Parse, std::string(what) + ": " + e.what());
    }
}

}  // namespace

DatasetSchema schema_from_json(const Json& j) {
    return guarded("schema", [&] {
        DatasetSchema s;
        const auto& o = j.at("outcome");
        if (o.is_string()) {
            s.outcome.name = o.get<std::string>();
        } else {
            s.outcome.name = o.at("name").get<std::string>();
            s.outcome.positive = o.value("positive", std::string("1"));
            s.outcome.negative = o.value("negative", std::string("0"));
        }
        for (const auto& v : j.at("variables")) {
            VariableSpec spec;
            spec.name = v.at("name").get<std::string>();
            spec.kind = parse_variable_kind(v.at("kind").get<std::string>());
            spec.categories = v.value("categories", std::vector<std::string>{});
            spec.group = v.value("group", spec.name);
            spec.is_moderator = v.value("moderator", false);
            s.variables.push_back(std::move(spec));
        }
        s.validate();
        return s;
    });
}

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json parse_json(const fs::path& path) {
    const std::string text = read_text(path);
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        fail(ErrorCode::Parse, "'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

}  // namespace

DatasetSchema read_schema(const fs::path& path) { return schema_from_json(parse_json(path)); }

std::string schema_fingerprint(const DatasetSchema& schema) {
    const std::string canonical = schema_to_json(schema).dump();
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : canonical) {
        h = (h ^ c) * 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Fit

Json fit_to_json(const BoostFit& fit) {
    Json j;
    j["offset"] = fit.offset;
    j["initial_risk"] = fit.initial_risk;
    j["total_risk_reduction"] = fit.total_risk_reduction;
    Json learners = Json::array();
    for (const auto& l : fit.learners) {
        learners.push_back({{"id", l.id},
                            {"kind", std::string(to_string(l.kind))},
                            {"stage", l.stage},
                            {"columns", l.column_names},
                            {"centers", l.centers},
                            {"coef", std::vector<double>(l.coef.data(), l.coef.data() + l.coef.size())}});
    }
    j["learners"] = std::move(learners);
    Json path = Json::array();
    for (const auto& s : fit.path) {
        path.push_back({{"iteration", s.iteration},
                        {"stage", s.stage},
                        {"learner", s.learner_id},
                        {"risk_after", s.risk_after}});
    }
    j["path"] = std::move(path);
    return j;
}

BoostFit fit_from_json(const Json& j) {
    return guarded("fit", [&] {
        BoostFit fit;
        fit.offset = j.at("offset").get<double>();
        fit.initial_risk = j.at("initial_risk").get<double>();
        fit.total_risk_reduction = j.at("total_risk_reduction").get<double>();
        for (const auto& l : j.at("learners")) {
            FittedLearner f;
            f.id = l.at("id").get<std::string>();
            f.kind = parse_learner_kind(l.at("kind").get<std::string>());
            f.stage = l.at("stage").get<int>();
            f.column_names = l.at("columns").get<std::vector<std::string>>();
            f.centers = l.at("centers").get<std::vector<double>>();
            const auto coef = l.at("coef").get<std::vector<double>>();
            if (coef.size() != f.column_names.size() || f.centers.size() != f.column_names.size()) {
                fail(ErrorCode::Parse, "learner '" + f.id + "' has inconsistent column arrays");
            }
            f.coef = Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Index>(coef.size()));
            fit.learners.push_back(std::move(f));
        }
        for (const auto& s : j.at("path")) {
            SelectionStep step;
            step.iteration = s.at("iteration").get<int>();
            step.stage = s.at("stage").get<int>();
            step.learner_id = s.at("learner").get<std::string>();
            step.risk_after = s.at("risk_after").get<double>();
            fit.path.push_back(std::move(step));
        }
        return fit;
    });
}

// ---------------------------------------------------------------------------
// Run configuration and artifact

Json run_config_to_json(const RunConfig& c) {
    Json j;
    j["model"] = std::string(to_string(c.model.model));
    j["alpha"] = c.model.model == ModelKind::sgb ? Json(c.model.alpha) : Json(nullptr);
    j["eta"] = c.model.boost.eta;
    j["m_max"] = c.model.m_max;
    j["cv_folds"] = c.model.cv_folds;
    j["train_fraction"] = c.train_fraction;
    j["seed"] = c.model.seed;
    j["offset_mode"] = std::string(to_string(c.model.boost.offset_mode));
    j["update_intercept"] = c.model.boost.update_intercept;
    j["data"] = c.data_path;
    j["schema"] = c.schema_path;
    return j;
}

RunConfig run_config_from_json(const Json& j) {
    return guarded("config", [&] {
        RunConfig c;
        c.model.model = parse_model_kind(j.at("model").get<std::string>());
        if (!j.at("alpha").is_null()) {
            c.model.alpha = j.at("alpha").get<double>();
        }
        c.model.boost.eta = j.at("eta").get<double>();
        c.model.m_max = j.at("m_max").get<int>();
        c.model.cv_folds = j.at("cv_folds").get<int>();
        c.train_fraction = j.at("train_fraction").get<double>();
        c.model.seed = j.at("seed").get<std::uint64_t>();
        c.model.boost.offset_mode = parse_offset_mode(j.at("offset_mode").get<std::string>());
        c.model.boost.update_intercept = j.at("update_intercept").get<bool>();
        c.data_path = j.value("data", std::string());
        c.schema_path = j.value("schema", std::string());
        return c;
    });
}

Json artifact_to_json(const ModelArtifact& a) {
    Json j;
    j["format"] = std::string(kArtifactFormat);
    j["version"] = kArtifactVersion;
    j["software_version"] = a.software_version;
    j["fingerprint"] = a.fingerprint;
    j["schema"] = schema_to_json(a.schema);
    j["config"] = run_config_to_json(a.config);
    j["split"] = {{"train", a.split.train}, {"test", a.split.test}};
    Json stages = Json::array();
    for (const auto& s : a.stages) {
        stages.push_back({{"name", s.name},
                          {"learners", s.learner_count},
                          {"dropped", s.dropped},
                          {"m_star", s.m_star},
                          {"cv_mean_risk", std::vector<double>(s.cv_mean_risk.data(),
                                                               s.cv_mean_risk.data() + s.cv_mean_risk.size())}});
    }
    j["stages"] = std::move(stages);
    j["fit"] = fit_to_json(a.fit);
    j["metrics"] = {{"test_auc", a.test_auc}};
    return j;
}

ModelArtifact artifact_from_json(const Json& j) {
    return guarded("artifact", [&] {
        if (j.at("format").get<std::string>() != kArtifactFormat) {
            fail(ErrorCode::Parse, "not a model artifact");
        }
        if (j.at("version").get<int>() != kArtifactVersion) {
            fail(ErrorCode::Parse, "unsupported artifact version " + j.at("version").dump());
        }
        ModelArtifact a;
        a.software_version = j.at("software_version").get<std::string>();
        a.fingerprint = j.at("fingerprint").get<std::string>();
        a.schema = schema_from_json(j.at("schema"));
        if (schema_fingerprint(a.schema) != a.fingerprint) {
            fail(ErrorCode::FingerprintMismatch, "artifact schema does not match its fingerprint");
        }
        a.config = run_config_from_json(j.at("config"));
        a.split.train = j.at("split").at("train").get<std::vector<Index>>();
        a.split.test = j.at("split").at("test").get<std::vector<Index>>();
        for (const auto& s : j.at("stages")) {
            StageSummary st;
            st.name = s.at("name").get<std::string>();
            st.learner_count = s.at("learners").get<std::size_t>();
            st.dropped = s.at("dropped").get<std::vector<std::string>>();
            st.m_star = s.at("m_star").get<int>();
            const auto risk = s.at("cv_mean_risk").get<std::vector<double>>();
            st.cv_mean_risk = Eigen::Map<const Eigen::VectorXd>(risk.data(), static_cast<Index>(risk.size()));
            a.stages.push_back(std::move(st));
        }
        a.fit = fit_from_json(j.at("fit"));
        a.test_auc = j.at("metrics").at("test_auc").get<double>();
        return a;
    });
}

ModelArtifact read_artifact(const fs::path& path) { return artifact_from_json(parse_json(path)); }

void write_file_atomic(const fs::path& path, std::string_view contents) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) {
            fail(ErrorCode::Io, "write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(ErrorCode::Io, "cannot move output into place at '" + path.string() + "'");
    }
}

// ---------------------------------------------------------------------------
// Reports

std::string importance_csv(const ImportanceTable& table) {
    std::string out = "learner,absolute,relative\n";
    for (const auto& r : table.rows) {
        out += csv_escape(r.learner_id) + "," + format_double(r.absolute) + "," +
               format_double(r.relative) + "\n";
    }
    return out;
}

std::string roc_csv(const RocCurve& roc) {
    std::string out = "# auc=" + format_double(roc.auc) + "\nfpr,tpr,threshold\n";
    for (const auto& p : roc.points) {
        out += format_double(p.fpr) + "," + format_double(p.tpr) + "," + format_double(p.threshold) + "\n";
    }
    return out;
}

std::string odds_ratios_csv(const std::vector<OddsRatio>& rows) {
    std::string out = "learner,column,coefficient,odds_ratio\n";
    for (const auto& r : rows) {
        out += csv_escape(r.learner_id) + "," + csv_escape(r.column) + "," +
               format_double(r.coefficient) + "," + format_double(r.odds_ratio) + "\n";
    }
    return out;
}

std::string partial_effects_csv(const std::vector<PartialEffectGrid>& grids) {
    std::string out = "learner,point,contribution,probability\n";
    for (const auto& g : grids) {
        for (const auto& p : g.points) {
            out += csv_escape(g.learner_id) + "," + csv_escape(p.label) + "," +
                   format_double(p.contribution) + "," + format_double(p.probability) + "\n";
        }
    }
    return out;
}

std::string selection_path_csv(const BoostFit& fit) {
    std::string out = "iteration,stage,learner,risk_after\n";
    for (const auto& s : fit.path) {
        out += std::to_string(s.iteration) + "," + std::to_string(s.stage) + "," +
               csv_escape(s.learner_id) + "," + format_double(s.risk_after) + "\n";
    }
    return out;
}

std::string probe_csv(const std::vector<ProbeResult>& results) {
    std::string out =
        "term,stratum,status,moderator_category,partner_category,n,positives,probability\n";
    for (const auto& r : results) {
        const std::string term = r.moderator + ":" + r.partner;
        for (const auto& s : r.strata) {
            for (const auto& c : s.cells) {
                out += csv_escape(term) + "," + csv_escape(s.name) + "," + s.status + "," +
                       csv_escape(c.moderator_category) + "," + csv_escape(c.partner_category) + "," +
                       std::to_string(c.n) + "," + std::to_string(c.positives) + "," +
                       (std::isnan(c.probability) ? std::string() : format_double(c.probability)) + "\n";
            }
        }
    }
    return out;
}

std::vector<RocPoint> parse_roc_csv(std::string_view text, double& auc) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::getline(in, line);
    if (line.rfind("# auc=", 0) != 0) {
        fail(ErrorCode::Parse, "roc file lacks the auc header");
    }
    auc = std::strtod(line.c_str() + 6, nullptr);
    const Table t = parse_csv(in);
    std::vector<RocPoint> points;
    for (const auto& row : t.rows) {
        if (row.size() != 3) {
            fail(ErrorCode::Parse, "roc row must have 3 fields");
        }
        points.push_back({std::strtod(row[0].c_str(), nullptr), std::strtod(row[1].c_str(), nullptr),
                          std::strtod(row[2].c_str(), nullptr)});
    }
    return points;
}

}  // namespace sgboost

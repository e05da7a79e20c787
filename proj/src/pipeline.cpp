#include "sgboost/pipeline.hpp"

#include "sgboost/error.hpp"
#include "sgboost/rng.hpp"

namespace sgboost {

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::mb: return "mb";
        case ModelKind::group: return "group";
        case ModelKind::sgb: return "sgb";
        case ModelKind::mb_int: return "mb-int";
        case ModelKind::two_boost: return "2-boost";
    }
    return "mb";
}

ModelKind parse_model_kind(std::string_view text) {
    for (auto k : {ModelKind::mb, ModelKind::group, ModelKind::sgb, ModelKind::mb_int,
                   ModelKind::two_boost}) {
        if (text == to_string(k)) {
            return k;
        }
    }
    fail(ErrorCode::InvalidArgument, "unknown model '" + std::string(text) +
                                         "' (expected mb, group, sgb, mb-int or 2-boost)");
}

bool uses_interactions(ModelKind kind) {
    return kind == ModelKind::mb_int || kind == ModelKind::two_boost;
}

void ModelOptions::validate() const {
    boost.validate();
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        fail(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
    }
    if (m_max < 1) {
        fail(ErrorCode::InvalidArgument, "m_max must be at least 1");
    }
    if (cv_folds < 2) {
        fail(ErrorCode::InvalidArgument, "cv_folds must be at least 2");
    }
}

Prepared prepare(const DatasetSchema& schema, const Table& raw, bool with_interactions) {
    schema.validate();
    auto encoded = encode(schema, raw);
    Prepared out;
    out.outcome = std::move(encoded.outcome);
    if (with_interactions) {
        out.terms = expand_interactions(schema, encoded.design);
        out.design = append_interactions(encoded.design, out.terms);
    } else {
        out.design = std::move(encoded.design);
    }
    return out;
}

namespace {

std::uint64_t stage_seed(std::uint64_t seed, int stage) {
    return CounterRng(seed).split("cv", static_cast<std::uint64_t>(stage))();
}

StageSummary tune_and_run(BoostRun& run, const DesignMatrix& design, const BinaryOutcome& y,
                          std::string name, const std::vector<BaseLearner>& learners, int stage,
                          const ModelOptions& options, const BoostFit* start) {
    CvOptions cv;
    cv.folds = options.cv_folds;
    cv.m_max = options.m_max;
    cv.seed = stage_seed(options.seed, stage);
    cv.threads = options.threads;
    StageSummary summary;
    summary.name = std::move(name);
    summary.learner_count = learners.size();
    if (!learners.empty()) {
        const auto result = cv_mstop(design, y, learners, options.boost, cv, start);
        summary.m_star = result.m_star;
        summary.cv_mean_risk = result.mean_risk();
    }
    run.run_stage(learners, stage, summary.m_star);
    return summary;
}

}  // namespace

TrainedModel train_model(const DesignMatrix& design, const BinaryOutcome& y,
                         const DatasetSchema& schema, const ModelOptions& options) {
    options.validate();
    TrainedModel out;
    BoostRun run(design, y, options.boost);

    std::vector<BaseLearner> main;
    switch (options.model) {
        case ModelKind::group: main = build_group(design, schema); break;
        case ModelKind::sgb: {
            SgbSpec spec;
            spec.alpha = options.alpha;
            main = build_sgb(design, schema, spec);
            break;
        }
        default: main = build_mb(design, schema); break;
    }

    if (!uses_interactions(options.model)) {
        out.stages.push_back(tune_and_run(run, design, y, "main", main, 0, options, nullptr));
        out.fit = run.release();
        return out;
    }

    std::vector<InteractionTerm> terms;
    {
        // Terms are rebuilt from the design's product columns so the learners
        // see exactly the columns of this (possibly subset) design.
        const auto pairs = interaction_pairs(schema);
        for (const auto& [m, p] : pairs) {
            InteractionTerm t;
            t.moderator = m;
            t.partner = p;
            terms.push_back(std::move(t));
        }
    }
    auto inter = build_interaction_learners(design, terms);

    if (options.model == ModelKind::mb_int) {
        std::vector<BaseLearner> all = main;
        all.insert(all.end(), inter.learners.begin(), inter.learners.end());
        auto s = tune_and_run(run, design, y, "main+interactions", all, 0, options, nullptr);
        s.dropped = std::move(inter.dropped);
        out.stages.push_back(std::move(s));
        out.fit = run.release();
        return out;
    }

    out.stages.push_back(tune_and_run(run, design, y, "main", main, 0, options, nullptr));
    const BoostFit stage1 = run.fit();
    auto s = tune_and_run(run, design, y, "interactions", inter.learners, 1, options, &stage1);
    s.dropped = std::move(inter.dropped);
    out.stages.push_back(std::move(s));
    out.fit = run.release();
    return out;
}

int selected_interactions(const BoostFit& fit) {
    int count = 0;
    for (const auto& l : fit.learners) {
        if (l.kind == LearnerKind::interaction && l.selected()) {
            ++count;
        }
    }
    return count;
}

Experiment run_experiment(const Prepared& data, const DatasetSchema& schema,
                          const ModelOptions& options, double train_fraction) {
    options.validate();
    SplitSpec spec;
    spec.train_fraction = train_fraction;
    spec.seed = options.seed;
    Experiment out;
    out.split = split(data.outcome, spec);
    const auto train_design = data.design.subset(out.split.train);
    const auto train_y = data.outcome.subset(out.split.train);
    out.model = train_model(train_design, train_y, schema, options);
    const auto test_design = data.design.subset(out.split.test);
    const auto test_y = data.outcome.subset(out.split.test);
    const Eigen::VectorXd scores = predict(out.model.fit, test_design);
    out.test_roc = roc_auc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())),
                           test_y);
    return out;
}

std::vector<std::pair<std::string, std::string>> interaction_pairs(const DatasetSchema& schema) {
    std::vector<std::pair<std::string, std::string>> out;
    const auto& vars = schema.variables;
    for (std::size_t m = 0; m < vars.size(); ++m) {
        if (!vars[m].is_moderator) {
            continue;
        }
        for (std::size_t v = 0; v < vars.size(); ++v) {
            if (v == m || (vars[v].is_moderator && v < m)) {
                continue;
            }
            out.emplace_back(vars[m].name, vars[v].name);
        }
    }
    return out;
}

}  // namespace sgboost

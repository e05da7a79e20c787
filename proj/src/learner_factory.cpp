#include "sgboost/learner_factory.hpp"

#include "sgboost/error.hpp"

namespace sgboost {

void SgbSpec::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        fail(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
    }
    if (!(df_base > 0.0)) {
        fail(ErrorCode::InvalidArgument, "df_base must be positive");
    }
    for (const auto& g : group_index) {
        if (g.variables.empty() || g.columns.empty()) {
            fail(ErrorCode::InvalidArgument, "group '" + g.group + "' is empty");
        }
    }
}

std::string group_learner_id(const std::string& group) { return "group:" + group; }

namespace {

std::vector<Index> variable_columns(const DesignMatrix& design, const std::string& name) {
    auto cols = design.term_columns(name);
    if (cols.empty()) {
        fail(ErrorCode::ColumnMismatch, "design has no columns for '" + name + "'");
    }
    return cols;
}

}  // namespace

std::vector<BaseLearner> build_mb(const DesignMatrix& design, const DatasetSchema& schema) {
    std::vector<BaseLearner> out;
    out.reserve(schema.variables.size());
    for (const auto& v : schema.variables) {
        out.push_back(make_learner(design, v.name, variable_columns(design, v.name), 1.0,
                                   LearnerKind::individual));
    }
    return out;
}

std::vector<BaseLearner> build_group(const DesignMatrix& design, const DatasetSchema& schema) {
    std::vector<BaseLearner> out;
    for (const auto& g : column_group_index(schema, design)) {
        out.push_back(make_learner(design, group_learner_id(g.group), g.columns, 1.0,
                                   LearnerKind::group));
    }
    return out;
}

std::vector<BaseLearner> build_sgb(const DesignMatrix& design, const DatasetSchema& schema,
                                   const SgbSpec& spec) {
    spec.validate();
    const auto groups = spec.group_index.empty() ? column_group_index(schema, design)
                                                 : spec.group_index;
    std::vector<BaseLearner> out;
    for (const auto& g : groups) {
        const double p_g = static_cast<double>(g.variables.size());
        const double df_individual = spec.df_base * spec.alpha / p_g;
        const double df_group = spec.df_base * (1.0 - spec.alpha) / p_g;
        if (df_individual > 0.0) {
            for (const auto& name : g.variables) {
                out.push_back(make_learner(design, name, variable_columns(design, name),
                                           df_individual, LearnerKind::individual));
            }
        }
        if (df_group > 0.0) {
            out.push_back(make_learner(design, group_learner_id(g.group), g.columns, df_group,
                                       LearnerKind::group));
        }
    }
    return out;
}

InteractionLearners build_interaction_learners(const DesignMatrix& design,
                                               std::span<const InteractionTerm> terms) {
    InteractionLearners out;
    out.learners.reserve(terms.size());
    for (const auto& term : terms) {
        auto cols = design.term_columns(term.id());
        if (cols.empty()) {
            out.dropped.push_back(term.id());
            continue;
        }
        bool varies = false;
        for (Index c : cols) {
            const auto column = design.values.col(c);
            varies = varies || (column.array() != column(0)).any();
        }
        const auto spectrum = gram_spectrum(design, cols);
        if (!varies || spectrum.rank() < 1) {
            out.dropped.push_back(term.id());
            continue;
        }
        BaseLearner l;
        l.id = term.id();
        l.lambda = calibrate_lambda(spectrum, 1.0);
        l.columns = std::move(cols);
        l.df_target = 1.0;
        l.kind = LearnerKind::interaction;
        out.learners.push_back(std::move(l));
    }
    return out;
}

}  // namespace sgboost

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgboost/boost.hpp"
#include "sgboost/data_model.hpp"
#include "sgboost/logistic.hpp"
#include "sgboost/table.hpp"

namespace sgboost {

struct ImportanceRow {
    std::string learner_id;
    LearnerKind kind = LearnerKind::individual;
    double absolute = 0.0;  // summed risk reduction
    double relative = 0.0;  // share of the total reduction
};

struct ImportanceTable {
    std::vector<ImportanceRow> rows;  // registration order of the fit
    double total_reduction = 0.0;
};

/// Credits each step's risk drop to the learner selected in that step.
/// Empty for a fit without steps; otherwise one row per registered learner.
ImportanceTable importance(const BoostFit& fit);

struct OddsRatio {
    std::string learner_id;
    std::string column;
    double coefficient = 0.0;
    double odds_ratio = 1.0;
};

/// exp(accumulated coefficient) per learner column: the odds multiplier for
/// a unit step of the raw column (0 -> 1 for category indicators).
std::vector<OddsRatio> odds_ratios(const BoostFit& fit);

struct PartialEffectPoint {
    std::vector<double> raw;  // learner columns, un-centered
    std::string label;
    double contribution = 0.0;
    double probability = 0.5;
};

struct PartialEffectGrid {
    std::string learner_id;
    std::vector<std::string> columns;
    /// offset + mean over rows of every other learner's contribution.
    double baseline = 0.0;
    std::vector<PartialEffectPoint> points;
};

/// Distinct observed rows of the learner's columns, sorted; capped at 64
/// (beyond that, 21 rows at quantiles of the learner's contribution).
std::vector<std::vector<double>> default_grid(const BoostFit& fit, const DesignMatrix& design,
                                              std::string_view learner_id);

PartialEffectGrid partial_effects(const BoostFit& fit, const DesignMatrix& design,
                                  std::string_view learner_id,
                                  const std::vector<std::vector<double>>& grid);

PartialEffectGrid partial_effects(const BoostFit& fit, const DesignMatrix& design,
                                  std::string_view learner_id);

struct ProbeCell {
    std::string moderator_category;
    std::string partner_category;
    Index n = 0;
    Index positives = 0;
    /// NaN when the stratum did not produce a usable fit.
    double probability = 0.0;
};

struct ProbeStratum {
    std::string name;
    bool converged = false;
    /// "ok", "separation", "non_convergence" or "empty_cell".
    std::string status;
    std::vector<ProbeCell> cells;
};

struct ProbeResult {
    std::string moderator;
    std::string partner;
    std::vector<ProbeStratum> strata;
};

struct ProbeOptions {
    /// Include both main effects next to the product columns.
    bool main_effects = true;
    LogisticOptions logistic;
};

/// Classical logistic regression with one interaction term, fitted per
/// stratum (in order of the strata column's categories) and on the pooled
/// rows, reporting the fitted probability for every joint category.
ProbeResult interaction_probe(const Table& raw, const DatasetSchema& schema,
                              std::string_view moderator, std::string_view partner,
                              const std::optional<std::string>& strata_column,
                              const ProbeOptions& options = {});

}  // namespace sgboost

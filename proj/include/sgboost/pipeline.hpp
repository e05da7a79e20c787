#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sgboost/boost.hpp"
#include "sgboost/data_model.hpp"
#include "sgboost/learner_factory.hpp"
#include "sgboost/tuning.hpp"

namespace sgboost {

enum class ModelKind { mb, group, sgb, mb_int, two_boost };

/// "mb", "group", "sgb", "mb-int", "2-boost".
std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);
bool uses_interactions(ModelKind kind);

struct ModelOptions {
    ModelKind model = ModelKind::mb;
    double alpha = 0.5;  // sgb only
    BoostConfig boost;   // m_stop is replaced by the CV choice of each stage
    int m_max = 1000;
    int cv_folds = 10;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    void validate() const;
};

/// Whole-table encoding, with interaction products appended when asked.
struct Prepared {
    DesignMatrix design;
    BinaryOutcome outcome;
    std::vector<InteractionTerm> terms;
};

Prepared prepare(const DatasetSchema& schema, const Table& raw, bool with_interactions);

struct StageSummary {
    std::string name;
    std::size_t learner_count = 0;
    std::vector<std::string> dropped;
    int m_star = 0;
    Eigen::VectorXd cv_mean_risk;
};

struct TrainedModel {
    BoostFit fit;
    std::vector<StageSummary> stages;
};

/// Builds the learner sets of the model on this (training) design, tunes
/// each stage's budget by cross-validation and fits. For 2-boost the second
/// stage is tuned and fitted starting from the frozen first-stage fit.
TrainedModel train_model(const DesignMatrix& design, const BinaryOutcome& y,
                         const DatasetSchema& schema, const ModelOptions& options);

/// Number of interaction learners with a nonzero coefficient.
int selected_interactions(const BoostFit& fit);

struct Experiment {
    Split split;
    TrainedModel model;
    RocCurve test_roc;
};

/// Split, train on the training rows, evaluate AUC on the test rows.
/// The split seed is options.seed.
Experiment run_experiment(const Prepared& data, const DatasetSchema& schema,
                          const ModelOptions& options, double train_fraction = 0.7);

/// Unordered (moderator, partner) variable pairs in the order
/// expand_interactions emits them.
std::vector<std::pair<std::string, std::string>> interaction_pairs(const DatasetSchema& schema);

}  // namespace sgboost

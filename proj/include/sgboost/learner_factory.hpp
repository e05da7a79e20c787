#pragma once

#include <span>
#include <string>
#include <vector>

#include "sgboost/base_learner.hpp"
#include "sgboost/data_model.hpp"

namespace sgboost {

struct SgbSpec {
    double alpha = 0.5;
    /// Scales both formulas; 1 reproduces df_individual = alpha / p_g and
    /// df_group = (1 - alpha) / p_g.
    double df_base = 1.0;
    std::vector<GroupColumns> group_index;

    void validate() const;
};

/// Learner id of the group learner for a schema group.
std::string group_learner_id(const std::string& group);

/// One individual learner per predictor variable (a multi-category variable
/// contributes one block learner), each calibrated to df = 1.
std::vector<BaseLearner> build_mb(const DesignMatrix& design, const DatasetSchema& schema);

/// One group learner per schema group over all its main-effect columns,
/// calibrated to df = 1 like the mb learners.
std::vector<BaseLearner> build_group(const DesignMatrix& design, const DatasetSchema& schema);

/// Per group g with p_g variables: p_g individual learners at
/// df = df_base * alpha / p_g and one group learner at
/// df = df_base * (1 - alpha) / p_g. Learners whose target is 0 are omitted.
std::vector<BaseLearner> build_sgb(const DesignMatrix& design, const DatasetSchema& schema,
                                   const SgbSpec& spec);

struct InteractionLearners {
    std::vector<BaseLearner> learners;
    /// Terms whose product columns carry no variation (or are missing).
    std::vector<std::string> dropped;
};

/// One learner per term over its product columns at df = 1. The design must
/// contain the product columns (see append_interactions).
InteractionLearners build_interaction_learners(const DesignMatrix& design,
                                               std::span<const InteractionTerm> terms);

}  // namespace sgboost

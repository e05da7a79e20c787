#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sgboost/data_model.hpp"
#include "sgboost/pipeline.hpp"
#include "sgboost/table.hpp"

namespace sgboost {

struct InteractionBeta {
    std::string moderator;  // "var" or "var=cat"
    std::string partner;
    double beta = 0.0;
};

/// Coefficient keys name a design column: "var" for a binary variable's
/// non-reference category or a continuous variable, "var=cat" for a
/// specific category. Coefficients act on un-centered 0/1 indicators.
struct SynthSpec {
    Index n = 1000;
    DatasetSchema schema;
    /// P(non-reference category) per binary variable; default 0.5.
    /// Categorical variables are uniform, continuous ones standard normal.
    std::map<std::string, double> marginal;
    std::map<std::string, double> beta_main;
    std::vector<InteractionBeta> beta_interaction;
    /// Effect of each group's latent 0/1 factor on the outcome.
    std::map<std::string, double> beta_latent;
    /// Probability that a binary variable copies its group's latent factor
    /// instead of being drawn independently. 0 gives independent predictors.
    double latent_share = 0.0;
    double intercept = 0.0;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SynthData {
    Table table;
    /// True linear predictor and success probability per row.
    Eigen::VectorXd eta;
    Eigen::VectorXd probability;
};

SynthData generate(const SynthSpec& spec);

/// Binary predictors x1..xp with categories {0, 1}, consecutive groups of
/// group_size named g1, g2, ..., the first n_moderators flagged as
/// moderators, outcome "y".
DatasetSchema make_synth_schema(int p, int n_moderators, int group_size);

/// E[h(eta)] by enumeration over the variables and latent factors that carry
/// a coefficient. Throws InvalidArgument when a continuous variable carries
/// one or more than 24 factors would need enumerating.
double analytic_prevalence(const SynthSpec& spec);

struct NullStudyOptions {
    int p = 30;
    int n_moderators = 10;
    int group_size = 5;
    Index n = 600;
    /// Main effects beta_main on x1..x_signal, alternating sign.
    int signal = 6;
    double beta_main = 1.0;
    std::vector<std::uint64_t> seeds;
    ModelOptions model;  // model kind is overridden
};

struct NullStudyRow {
    std::uint64_t seed = 0;
    int mb_int = 0;
    int two_boost = 0;
};

struct NullStudyReport {
    std::vector<NullStudyRow> rows;
    double median_mb_int = 0.0;
    double median_two_boost = 0.0;
};

/// Main-effects-only truth: counts the interaction learners selected by
/// mb-int and by 2-boost on each seed's training split.
NullStudyReport null_interaction_study(const NullStudyOptions& options);

double median(std::vector<double> values);

}  // namespace sgboost

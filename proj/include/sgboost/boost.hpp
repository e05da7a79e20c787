#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sgboost/base_learner.hpp"
#include "sgboost/data_model.hpp"

namespace sgboost {

/// Binomial negative log-likelihood with logit link, outcome coded {0,1}.
struct BinomialLoss {
    static constexpr const char* name = "binomial-logit";
    static constexpr double clamp = 1e-12;

    static double link(double eta);
    /// y - h(f)
    static Eigen::VectorXd negative_gradient(const Eigen::VectorXd& y, const Eigen::VectorXd& f);
    /// Unpenalized empirical risk, probabilities clamped to [1e-12, 1 - 1e-12].
    static double risk(const Eigen::VectorXd& y, const Eigen::VectorXd& f);
};

enum class OffsetMode { zero, mean_link };

std::string_view to_string(OffsetMode mode);
OffsetMode parse_offset_mode(std::string_view text);

struct BoostConfig {
    double eta = 0.1;
    int m_stop = 100;
    OffsetMode offset_mode = OffsetMode::mean_link;
    /// Move the offset by eta * mean(u) alongside every selected learner.
    /// Learners are centered, so this does not change which one is selected;
    /// it lets the intercept follow the fit instead of staying at the
    /// initial value.
    bool update_intercept = true;

    void validate() const;
};

/// Accumulated state of one learner inside a fit. Coefficients apply to
/// (raw column - center) with the centers of the data the fit was trained on.
struct FittedLearner {
    std::string id;
    LearnerKind kind = LearnerKind::individual;
    int stage = 0;
    std::vector<std::string> column_names;
    std::vector<double> centers;
    Eigen::VectorXd coef;

    bool selected() const { return (coef.array() != 0.0).any(); }
};

struct SelectionStep {
    int iteration = 0;  // 1-based, counted across stages
    int stage = 0;
    std::string learner_id;
    double risk_after = 0.0;
};

struct BoostFit {
    double offset = 0.0;
    /// Risk of the starting model (offset only for a fresh fit).
    double initial_risk = 0.0;
    std::vector<FittedLearner> learners;  // registration order
    std::vector<SelectionStep> path;
    double total_risk_reduction = 0.0;

    const FittedLearner* find(std::string_view id) const;
    double final_risk() const { return initial_risk - total_risk_reduction; }
};

struct Stage {
    std::string name;
    std::vector<BaseLearner> learners;
    /// nullopt means "tune by cross-validation"; must be resolved before
    /// k_step_boost runs.
    std::optional<int> iterations;
};

struct StagePlan {
    std::vector<Stage> stages;
    void validate() const;
};

Eigen::VectorXd pseudo_residuals(const BinaryOutcome& y, const Eigen::VectorXd& f);

double init_offset(const BinaryOutcome& y, OffsetMode mode);

/// Least-squares solvers of a learner set precompiled against one design.
/// Selection uses g = X'u once per call: sse_r = u'u - g_r' Q_r g_r with
/// Q_r = (G + 2 lambda I)(G + lambda I)^-2, so learner evaluation is O(k^2).
class LearnerBank {
public:
    LearnerBank(const DesignMatrix& design, std::span<const BaseLearner> learners);

    std::size_t size() const { return solvers_.size(); }

    struct Choice {
        std::size_t index = 0;
        double sse = 0.0;
        Eigen::VectorXd beta;
    };

    /// Minimum-sse learner for target u; ties go to the lowest index.
    Choice select(const Eigen::VectorXd& u) const;

    /// sse of every learner (same arithmetic as select()).
    Eigen::VectorXd sse_all(const Eigen::VectorXd& u) const;

    /// Fitted values X_r beta over the full design rows.
    Eigen::VectorXd fitted(std::size_t learner, const Eigen::VectorXd& beta) const;

    const std::vector<Index>& columns(std::size_t learner) const;

private:
    struct Solver {
        std::vector<Index> local;   // positions in used_
        std::vector<Index> global;  // design column indices
        Eigen::MatrixXd inverse;    // (G + lambda I)^+
        Eigen::MatrixXd criterion;  // Q
    };
    Eigen::VectorXd reductions(const Eigen::VectorXd& g) const;

    Eigen::MatrixXd used_;  // compact copy of the columns any learner touches
    std::vector<Solver> solvers_;
};

std::pair<std::size_t, LearnerFit> select_learner(std::span<const BaseLearner> learners,
                                                  const DesignMatrix& design,
                                                  const Eigen::VectorXd& u);

struct StepInfo {
    std::size_t learner = 0;  // index within the running stage
    const Eigen::VectorXd* beta = nullptr;
    double intercept_step = 0.0;
    double eta = 0.0;
};

/// Mutable boosting state over one training design. boost(), k_step_boost()
/// and cross-validation all drive this.
class BoostRun {
public:
    BoostRun(const DesignMatrix& design, const BinaryOutcome& y, BoostConfig config);
    /// Continues from an existing fit evaluated on this design.
    BoostRun(const DesignMatrix& design, const BinaryOutcome& y, BoostConfig config,
             const BoostFit& start);

    void run_stage(std::span<const BaseLearner> learners, int stage, int iterations,
                   const std::function<void(const StepInfo&)>& observer = {});

    const BoostFit& fit() const { return fit_; }
    BoostFit release() { return std::move(fit_); }
    const Eigen::VectorXd& linear_predictor() const { return f_; }
    double risk() const { return risk_; }

private:
    std::size_t register_learner(const BaseLearner& learner, int stage);

    const DesignMatrix* design_;
    const BinaryOutcome* y_;
    BoostConfig config_;
    BoostFit fit_;
    Eigen::VectorXd f_;
    double risk_ = 0.0;
    std::unordered_map<std::string, std::size_t> slot_;
};

BoostFit boost(const DesignMatrix& design, const BinaryOutcome& y,
               std::span<const BaseLearner> learners, const BoostConfig& config);

/// Stage k starts from the fit of stage k-1; every stage budget must be set.
/// config.m_stop is ignored.
BoostFit k_step_boost(const DesignMatrix& design, const BinaryOutcome& y, const StagePlan& plan,
                      const BoostConfig& config);

/// offset + sum over learners of (raw - center) * coef, columns resolved by
/// name. Throws ColumnMismatch when a learner column is absent.
Eigen::VectorXd linear_predictor(const BoostFit& fit, const DesignMatrix& design);

Eigen::VectorXd predict(const BoostFit& fit, const DesignMatrix& design);

}  // namespace sgboost

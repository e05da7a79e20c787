#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "sgboost/boost.hpp"
#include "sgboost/data_model.hpp"

namespace sgboost {

struct SplitSpec {
    double train_fraction = 0.7;
    std::uint64_t seed = 1;
    bool stratified = true;

    void validate() const;
};

struct Split {
    std::vector<Index> train;  // ascending
    std::vector<Index> test;   // ascending
};

/// Train size is round(fraction * n). Stratified: each class gets
/// floor(fraction * n_c) rows; the remaining slots go one per class in order
/// of largest fractional part (ties to the lower label).
Split split(const BinaryOutcome& y, const SplitSpec& spec);

/// Stratified fold labels in [0, folds), deterministic given the seed.
std::vector<int> stratified_folds(const BinaryOutcome& y, int folds, std::uint64_t seed);

struct CvOptions {
    int folds = 10;
    int m_max = 1000;
    std::uint64_t seed = 1;
    /// 0 = hardware concurrency.
    unsigned threads = 0;
};

struct CvResult {
    /// folds x (m_max + 1) out-of-fold negative log-likelihoods.
    Eigen::MatrixXd risk;
    int m_star = 0;

    Eigen::VectorXd mean_risk() const { return risk.colwise().mean().transpose(); }
};

/// Records out-of-fold risk after every iteration 0..m_max of one boosting
/// run per fold and returns the argmin of the fold-mean curve (ties to the
/// smallest m). Learner penalties are held fixed across folds. With a start
/// fit, every fold continues from that frozen fit instead of a fresh offset.
CvResult cv_mstop(const DesignMatrix& design, const BinaryOutcome& y,
                  std::span<const BaseLearner> learners, const BoostConfig& config,
                  const CvOptions& options, const BoostFit* start = nullptr);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.5;
};

/// Empirical ROC over all distinct score thresholds, from (0,0) to (1,1);
/// tied scores give a diagonal segment. auc is the trapezoidal area.
RocCurve roc_auc(std::span<const double> scores, const BinaryOutcome& labels);

/// Mann-Whitney pair count: P(score+ > score-) + 0.5 P(score+ = score-).
double auc_pair_count(std::span<const double> scores, const BinaryOutcome& labels);

/// Trapezoidal area under a list of ROC points.
double trapezoid_area(std::span<const RocPoint> points);

}  // namespace sgboost

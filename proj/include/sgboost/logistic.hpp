#pragma once

#include <Eigen/Dense>

namespace sgboost {

struct LogisticOptions {
    int max_iterations = 50;
    /// Relative deviance change |dev - dev_old| / (|dev| + 0.1).
    double tolerance = 1e-10;
    /// Fitted probabilities this close to 0 or 1 indicate separation.
    double boundary = 1e-8;
};

struct LogisticFit {
    Eigen::VectorXd beta;
    Eigen::VectorXd probabilities;
    double deviance = 0.0;
    int iterations = 0;
    bool converged = false;
    bool separated = false;

    bool usable() const { return converged && !separated; }
};

/// Unpenalized logistic regression by iteratively reweighted least squares.
/// The caller supplies the intercept column. Never throws on separation or
/// non-convergence; those are reported through the flags.
LogisticFit fit_logistic_irls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              const LogisticOptions& options = {});

}  // namespace sgboost

#include "sgboost/logistic.hpp"

#include <algorithm>
#include <cmath>

#include "sgboost/boost.hpp"
#include "sgboost/error.hpp"

namespace sgboost {

namespace {

double binomial_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& p) {
    double dev = 0.0;
    for (Index i = 0; i < y.size(); ++i) {
        const double pi = std::clamp(p(i), 1e-300, 1.0 - 1e-16);
        dev -= 2.0 * (y(i) * std::log(pi) + (1.0 - y(i)) * std::log1p(-pi));
    }
    return dev;
}

}  // namespace

LogisticFit fit_logistic_irls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              const LogisticOptions& options) {
    if (x.rows() != y.size()) {
        fail(ErrorCode::InvalidArgument, "design and response lengths differ");
    }
    const Index n = x.rows();
    LogisticFit fit;
    fit.beta = Eigen::VectorXd::Zero(x.cols());

    // Start from the mean-link intercept equivalent used by glm: mu = (y + 0.5) / 2.
    Eigen::VectorXd mu = (y.array() + 0.5) / 2.0;
    Eigen::VectorXd eta = (mu.array() / (1.0 - mu.array())).log();
    double dev_old = binomial_deviance(y, mu);

    for (int it = 1; it <= options.max_iterations; ++it) {
        Eigen::VectorXd w(n);
        Eigen::VectorXd z(n);
        for (Index i = 0; i < n; ++i) {
            const double var = std::max(mu(i) * (1.0 - mu(i)), 1e-300);
            w(i) = var;
            z(i) = eta(i) + (y(i) - mu(i)) / var;
        }
        const Eigen::MatrixXd xtw = x.transpose() * w.asDiagonal();
        const Eigen::MatrixXd info = xtw * x;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
            fit.iterations = it;
            return fit;
        }
        Eigen::VectorXd beta = ldlt.solve(xtw * z);
        if (!beta.allFinite()) {
            fit.iterations = it;
            return fit;
        }
        fit.beta = beta;
        eta = x * fit.beta;
        for (Index i = 0; i < n; ++i) {
            mu(i) = BinomialLoss::link(eta(i));
        }
        const double dev = binomial_deviance(y, mu);
        fit.iterations = it;
        fit.deviance = dev;
        if (std::abs(dev - dev_old) / (std::abs(dev) + 0.1) < options.tolerance) {
            fit.converged = true;
            break;
        }
        dev_old = dev;
    }
    fit.probabilities = mu;
    fit.separated = ((mu.array() < options.boundary) || (mu.array() > 1.0 - options.boundary)).any();
    return fit;
}

}  // namespace sgboost

#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgboost/data_model.hpp"

namespace sgboost {

enum class LearnerKind { individual, group, interaction };

std::string_view to_string(LearnerKind kind);
LearnerKind parse_learner_kind(std::string_view text);

/// A column subset of the design with a ridge penalty calibrated to a
/// target effective degrees of freedom.
struct BaseLearner {
    std::string id;
    std::vector<Index> columns;
    double lambda = 0.0;
    double df_target = 0.0;
    LearnerKind kind = LearnerKind::individual;
};

struct LearnerFit {
    Eigen::VectorXd beta;
    double sse = 0.0;
};

/// Eigendecomposition of the Gram matrix X'X of a column subset.
struct GramSpectrum {
    Eigen::VectorXd eigenvalues;  // ascending, clipped at 0
    Eigen::MatrixXd eigenvectors;

    double max_eigenvalue() const;
    /// Eigenvalues at or below this are treated as exact zeros.
    double zero_tolerance() const;
    Index rank() const;
};

GramSpectrum gram_spectrum(const DesignMatrix& design, std::span<const Index> columns);

/// tr(2S - S'S) of the ridge hat matrix S = X (X'X + lambda I)^-1 X',
/// evaluated through the eigenvalues d of X'X as
/// sum 2 d/(d+lambda) - (d/(d+lambda))^2. Zero eigenvalues contribute 0.
double effective_df(const GramSpectrum& spectrum, double lambda);
double effective_df(const DesignMatrix& design, std::span<const Index> columns, double lambda);

/// Solves effective_df(lambda) = df_target by bisection on log10(lambda)
/// relative to the largest eigenvalue. Returns 0 when df_target equals the
/// rank. Throws UnattainableDf when df_target exceeds the rank or is <= 0.
double calibrate_lambda(const GramSpectrum& spectrum, double df_target);
double calibrate_lambda(const DesignMatrix& design, std::span<const Index> columns,
                        double df_target);

/// Builds a learner with lambda calibrated on this design.
BaseLearner make_learner(const DesignMatrix& design, std::string id, std::vector<Index> columns,
                         double df_target, LearnerKind kind);

/// beta = (X'X + lambda I)^+ X' target restricted to the learner's columns
/// (pseudo-inverse on the null space of X), sse = ||target - X beta||^2.
LearnerFit fit_learner(const DesignMatrix& design, const BaseLearner& learner,
                       const Eigen::VectorXd& target);

}  // namespace sgboost

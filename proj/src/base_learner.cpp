#include "sgboost/base_learner.hpp"

#include <cmath>
#include <limits>

#include "sgboost/error.hpp"

namespace sgboost {

namespace {

constexpr double kDfTolerance = 1e-8;
constexpr int kMaxBisection = 200;
constexpr double kRelativeZero = 1e-10;

Eigen::MatrixXd gather(const DesignMatrix& design, std::span<const Index> columns) {
    Eigen::MatrixXd x(design.rows(), static_cast<Index>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) {
        if (columns[k] < 0 || columns[k] >= design.cols()) {
            fail(ErrorCode::ColumnMismatch, "column index " + std::to_string(columns[k]) +
                                                " outside design with " +
                                                std::to_string(design.cols()) + " columns");
        }
        x.col(static_cast<Index>(k)) = design.values.col(columns[k]);
    }
    return x;
}

}  // namespace

std::string_view to_string(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::individual: return "individual";
        case LearnerKind::group: return "group";
        case LearnerKind::interaction: return "interaction";
    }
    return "unknown";
}

LearnerKind parse_learner_kind(std::string_view text) {
    if (text == "individual") return LearnerKind::individual;
    if (text == "group") return LearnerKind::group;
    if (text == "interaction") return LearnerKind::interaction;
    fail(ErrorCode::Parse, "unknown learner kind '" + std::string(text) + "'");
}

double GramSpectrum::max_eigenvalue() const {
    return eigenvalues.size() > 0 ? eigenvalues.maxCoeff() : 0.0;
}

double GramSpectrum::zero_tolerance() const {
    const double dmax = max_eigenvalue();
    return dmax > 0.0 ? dmax * kRelativeZero : std::numeric_limits<double>::min();
}

Index GramSpectrum::rank() const {
    const double tol = zero_tolerance();
    return static_cast<Index>((eigenvalues.array() > tol).count());
}

GramSpectrum gram_spectrum(const DesignMatrix& design, std::span<const Index> columns) {
    if (columns.empty()) {
        fail(ErrorCode::InvalidArgument, "base-learner needs at least one column");
    }
    const Eigen::MatrixXd x = gather(design, columns);
    const Eigen::MatrixXd gram = x.transpose() * x;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) {
        fail(ErrorCode::NumericalFailure, "eigendecomposition of the Gram matrix failed");
    }
    GramSpectrum s;
    s.eigenvalues = solver.eigenvalues().cwiseMax(0.0);
    s.eigenvectors = solver.eigenvectors();
    return s;
}

double effective_df(const GramSpectrum& spectrum, double lambda) {
    if (!(lambda >= 0.0)) {
        fail(ErrorCode::InvalidArgument, "lambda must be >= 0");
    }
    const double tol = spectrum.zero_tolerance();
    double df = 0.0;
    for (Index i = 0; i < spectrum.eigenvalues.size(); ++i) {
        const double d = spectrum.eigenvalues(i);
        if (d <= tol) {
            continue;
        }
        const double t = d / (d + lambda);
        df += 2.0 * t - t * t;
    }
    return df;
}

double effective_df(const DesignMatrix& design, std::span<const Index> columns, double lambda) {
    return effective_df(gram_spectrum(design, columns), lambda);
}

double calibrate_lambda(const GramSpectrum& spectrum, double df_target) {
    const auto rank = static_cast<double>(spectrum.rank());
    if (!(df_target > 0.0) || df_target > rank + kDfTolerance) {
        fail(ErrorCode::UnattainableDf, "df target " + std::to_string(df_target) +
                                            " not in (0, rank=" + std::to_string(rank) + "]");
    }
    if (rank - df_target <= kDfTolerance) {
        return 0.0;
    }
    const double scale = spectrum.max_eigenvalue();
    auto df_at = [&](double log_lambda) {
        return effective_df(spectrum, scale * std::pow(10.0, log_lambda));
    };

    // df decreases in lambda: df(lo) >= target >= df(hi).
    double lo = -12.0;
    double hi = 12.0;
    while (df_at(lo) < df_target && lo > -300.0) {
        lo -= 12.0;
    }
    while (df_at(hi) > df_target && hi < 300.0) {
        hi += 12.0;
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < kMaxBisection; ++it) {
        mid = 0.5 * (lo + hi);
        const double df = df_at(mid);
        if (std::abs(df - df_target) <= kDfTolerance * 1e-3) {
            break;
        }
        if (df > df_target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 0.0) {
            break;
        }
    }
    const double lambda = scale * std::pow(10.0, mid);
    if (std::abs(effective_df(spectrum, lambda) - df_target) > kDfTolerance) {
        fail(ErrorCode::NumericalFailure, "df calibration did not reach target " +
                                              std::to_string(df_target));
    }
    return lambda;
}

double calibrate_lambda(const DesignMatrix& design, std::span<const Index> columns,
                        double df_target) {
    return calibrate_lambda(gram_spectrum(design, columns), df_target);
}

BaseLearner make_learner(const DesignMatrix& design, std::string id, std::vector<Index> columns,
                         double df_target, LearnerKind kind) {
    BaseLearner learner;
    learner.lambda = calibrate_lambda(design, columns, df_target);
    learner.id = std::move(id);
    learner.columns = std::move(columns);
    learner.df_target = df_target;
    learner.kind = kind;
    return learner;
}

LearnerFit fit_learner(const DesignMatrix& design, const BaseLearner& learner,
                       const Eigen::VectorXd& target) {
    if (target.size() != design.rows()) {
        fail(ErrorCode::InvalidArgument, "target has " + std::to_string(target.size()) +
                                             " entries, design has " +
                                             std::to_string(design.rows()) + " rows");
    }
    const Eigen::MatrixXd x = gather(design, learner.columns);
    const Eigen::MatrixXd gram = x.transpose() * x;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) {
        fail(ErrorCode::NumericalFailure, "eigendecomposition failed for learner '" + learner.id + "'");
    }
    const Eigen::VectorXd d = solver.eigenvalues().cwiseMax(0.0);
    const double tol = d.size() > 0 && d.maxCoeff() > 0.0 ? d.maxCoeff() * kRelativeZero
                                                         : std::numeric_limits<double>::min();
    Eigen::VectorXd rotated = solver.eigenvectors().transpose() * (x.transpose() * target);
    for (Index i = 0; i < d.size(); ++i) {
        rotated(i) = d(i) > tol ? rotated(i) / (d(i) + learner.lambda) : 0.0;
    }
    LearnerFit fit;
    fit.beta = solver.eigenvectors() * rotated;
    if (!fit.beta.allFinite()) {
        fail(ErrorCode::NumericalFailure, "non-finite coefficients for learner '" + learner.id + "'");
    }
    fit.sse = (target - x * fit.beta).squaredNorm();
    return fit;
}

}  // namespace sgboost

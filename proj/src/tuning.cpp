#include "sgboost/tuning.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "sgboost/error.hpp"
#include "sgboost/rng.hpp"

namespace sgboost {

void SplitSpec::validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        fail(ErrorCode::InvalidArgument, "train fraction must lie strictly inside (0, 1)");
    }
}

namespace {

std::array<std::vector<Index>, 2> rows_by_class(const BinaryOutcome& y) {
    std::array<std::vector<Index>, 2> out;
    for (Index i = 0; i < y.size(); ++i) {
        out[y.labels(i) > 0.5 ? 1 : 0].push_back(i);
    }
    return out;
}

}  // namespace

Split split(const BinaryOutcome& y, const SplitSpec& spec) {
    spec.validate();
    const Index n = y.size();
    if (n < 10) {
        fail(ErrorCode::TooFewObservations, "splitting needs at least 10 observations, got " +
                                                std::to_string(n));
    }
    const auto total = std::clamp<Index>(
        static_cast<Index>(std::llround(spec.train_fraction * static_cast<double>(n))), 1, n - 1);
    CounterRng rng = CounterRng(spec.seed).split("split");

    std::vector<char> in_train(static_cast<std::size_t>(n), 0);
    if (spec.stratified) {
        auto classes = rows_by_class(y);
        std::array<Index, 2> take{};
        std::array<double, 2> frac{};
        Index assigned = 0;
        for (int c = 0; c < 2; ++c) {
            rng.split("class", static_cast<std::uint64_t>(c)).shuffle(classes[c]);
            const double want = spec.train_fraction * static_cast<double>(classes[c].size());
            take[c] = static_cast<Index>(std::floor(want));
            frac[c] = want - static_cast<double>(take[c]);
            assigned += take[c];
        }
        std::array<int, 2> order{0, 1};
        if (frac[1] > frac[0]) {
            order = {1, 0};
        }
        for (int c : order) {
            if (assigned < total && take[c] < static_cast<Index>(classes[c].size())) {
                ++take[c];
                ++assigned;
            }
        }
        for (int c : order) {
            while (assigned < total && take[c] < static_cast<Index>(classes[c].size())) {
                ++take[c];
                ++assigned;
            }
        }
        for (int c = 0; c < 2; ++c) {
            for (Index k = 0; k < take[c]; ++k) {
                in_train[static_cast<std::size_t>(classes[c][static_cast<std::size_t>(k)])] = 1;
            }
        }
    } else {
        std::vector<Index> all(static_cast<std::size_t>(n));
        std::iota(all.begin(), all.end(), Index{0});
        rng.shuffle(all);
        for (Index k = 0; k < total; ++k) {
            in_train[static_cast<std::size_t>(all[static_cast<std::size_t>(k)])] = 1;
        }
    }
    Split out;
    for (Index i = 0; i < n; ++i) {
        (in_train[static_cast<std::size_t>(i)] ? out.train : out.test).push_back(i);
    }
    return out;
}

std::vector<int> stratified_folds(const BinaryOutcome& y, int folds, std::uint64_t seed) {
    if (folds < 2) {
        fail(ErrorCode::InvalidArgument, "cross-validation needs at least 2 folds");
    }
    if (folds > y.size()) {
        fail(ErrorCode::DegenerateFold, std::to_string(folds) + " folds for " +
                                            std::to_string(y.size()) + " observations");
    }
    CounterRng rng = CounterRng(seed).split("folds");
    auto classes = rows_by_class(y);
    std::vector<int> fold(static_cast<std::size_t>(y.size()), 0);
    std::size_t position = 0;
    for (int c = 0; c < 2; ++c) {
        rng.split("class", static_cast<std::uint64_t>(c)).shuffle(classes[c]);
        for (Index row : classes[c]) {
            fold[static_cast<std::size_t>(row)] = static_cast<int>(position++ % static_cast<std::size_t>(folds));
        }
    }
    return fold;
}

namespace {

struct FoldData {
    DesignMatrix train;
    BinaryOutcome y_train;
    DesignMatrix held_out;  // centered with the training centers
    BinaryOutcome y_held_out;
};

FoldData make_fold(const DesignMatrix& design, const BinaryOutcome& y, const std::vector<int>& fold,
                   int k) {
    std::vector<Index> train_rows;
    std::vector<Index> test_rows;
    for (std::size_t i = 0; i < fold.size(); ++i) {
        (fold[i] == k ? test_rows : train_rows).push_back(static_cast<Index>(i));
    }
    FoldData d;
    d.train = design.subset(train_rows);
    d.y_train = y.subset(train_rows);
    d.y_held_out = y.subset(test_rows);
    d.held_out.columns = d.train.columns;
    d.held_out.values.resize(static_cast<Index>(test_rows.size()), design.cols());
    for (Index j = 0; j < design.cols(); ++j) {
        const double shift = design.columns[static_cast<std::size_t>(j)].center -
                             d.train.columns[static_cast<std::size_t>(j)].center;
        for (std::size_t i = 0; i < test_rows.size(); ++i) {
            d.held_out.values(static_cast<Index>(i), j) = design.values(test_rows[i], j) + shift;
        }
    }
    return d;
}

Eigen::VectorXd run_fold(const FoldData& d, std::span<const BaseLearner> learners,
                         const BoostConfig& config, int m_max, const BoostFit* start) {
    Eigen::VectorXd risk(m_max + 1);
    auto run = start ? BoostRun(d.train, d.y_train, config, *start)
                     : BoostRun(d.train, d.y_train, config);
    Eigen::VectorXd f = start ? linear_predictor(*start, d.held_out)
                              : Eigen::VectorXd::Constant(d.held_out.rows(), run.fit().offset);
    risk(0) = BinomialLoss::risk(d.y_held_out.labels, f);
    Index m = 0;
    run.run_stage(learners, 0, m_max, [&](const StepInfo& step) {
        const auto& cols = learners[step.learner].columns;
        const auto& beta = *step.beta;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            f += step.eta * beta(static_cast<Index>(k)) * d.held_out.values.col(cols[k]);
        }
        if (step.intercept_step != 0.0) {
            f.array() += step.eta * step.intercept_step;
        }
        risk(++m) = BinomialLoss::risk(d.y_held_out.labels, f);
    });
    return risk;
}

}  // namespace

CvResult cv_mstop(const DesignMatrix& design, const BinaryOutcome& y,
                  std::span<const BaseLearner> learners, const BoostConfig& config,
                  const CvOptions& options, const BoostFit* start) {
    config.validate();
    if (options.m_max < 1) {
        fail(ErrorCode::InvalidArgument, "m_max must be >= 1");
    }
    if (y.size() != design.rows()) {
        fail(ErrorCode::InvalidArgument, "outcome length does not match design rows");
    }
    const auto fold = stratified_folds(y, options.folds, options.seed);
    for (int k = 0; k < options.folds; ++k) {
        Index pos = 0;
        Index count = 0;
        for (std::size_t i = 0; i < fold.size(); ++i) {
            if (fold[i] != k) {
                ++count;
                pos += y.labels(static_cast<Index>(i)) > 0.5 ? 1 : 0;
            }
        }
        if (pos == 0 || pos == count) {
            fail(ErrorCode::DegenerateFold,
                 "training part of fold " + std::to_string(k + 1) + " holds a single class");
        }
    }

    CvResult result;
    result.risk.resize(options.folds, options.m_max + 1);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(options.folds));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int k = next++; k < options.folds; k = next++) {
            try {
                const FoldData d = make_fold(design, y, fold, k);
                result.risk.row(k) = run_fold(d, learners, config, options.m_max, start).transpose();
            } catch (...) {
                errors[static_cast<std::size_t>(k)] = std::current_exception();
            }
        }
    };
    unsigned threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
    threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(options.folds));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    const Eigen::VectorXd mean = result.mean_risk();
    if (!mean.allFinite()) {
        fail(ErrorCode::NumericalFailure, "non-finite cross-validated risk");
    }
    result.m_star = 0;
    for (Index m = 1; m < mean.size(); ++m) {
        if (mean(m) < mean(result.m_star)) {
            result.m_star = static_cast<int>(m);
        }
    }
    return result;
}

RocCurve roc_auc(std::span<const double> scores, const BinaryOutcome& labels) {
    if (static_cast<Index>(scores.size()) != labels.size()) {
        fail(ErrorCode::InvalidArgument, "scores and labels differ in length");
    }
    const Index positives = labels.positives();
    const Index negatives = labels.size() - positives;
    if (positives == 0 || negatives == 0) {
        fail(ErrorCode::SingleClass, "ROC needs both classes");
    }
    for (double s : scores) {
        if (!std::isfinite(s)) {
            fail(ErrorCode::InvalidArgument, "non-finite score");
        }
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    const double p = static_cast<double>(positives);
    const double q = static_cast<double>(negatives);
    Index tp = 0;
    Index fp = 0;
    double doubled_area = 0.0;  // in units of pairs
    for (std::size_t k = 0; k < order.size();) {
        const double threshold = scores[order[k]];
        const Index tp0 = tp;
        const Index fp0 = fp;
        while (k < order.size() && scores[order[k]] == threshold) {
            (labels.labels(static_cast<Index>(order[k])) > 0.5 ? tp : fp) += 1;
            ++k;
        }
        doubled_area += static_cast<double>(fp - fp0) * static_cast<double>(tp + tp0);
        curve.points.push_back({static_cast<double>(fp) / q, static_cast<double>(tp) / p, threshold});
    }
    curve.auc = doubled_area / (2.0 * p * q);
    return curve;
}

double auc_pair_count(std::span<const double> scores, const BinaryOutcome& labels) {
    if (static_cast<Index>(scores.size()) != labels.size()) {
        fail(ErrorCode::InvalidArgument, "scores and labels differ in length");
    }
    const Index positives = labels.positives();
    const Index negatives = labels.size() - positives;
    if (positives == 0 || negatives == 0) {
        fail(ErrorCode::SingleClass, "AUC needs both classes");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] < scores[b];
    });
    double concordant = 0.0;  // doubled to keep ties integral
    Index negatives_below = 0;
    for (std::size_t k = 0; k < order.size();) {
        const double s = scores[order[k]];
        Index pos_tied = 0;
        Index neg_tied = 0;
        while (k < order.size() && scores[order[k]] == s) {
            (labels.labels(static_cast<Index>(order[k])) > 0.5 ? pos_tied : neg_tied) += 1;
            ++k;
        }
        concordant += static_cast<double>(pos_tied) *
                      (2.0 * static_cast<double>(negatives_below) + static_cast<double>(neg_tied));
        negatives_below += neg_tied;
    }
    return concordant / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

double trapezoid_area(std::span<const RocPoint> points) {
    double area = 0.0;
    for (std::size_t k = 1; k < points.size(); ++k) {
        area += (points[k].fpr - points[k - 1].fpr) * (points[k].tpr + points[k - 1].tpr) * 0.5;
    }
    return area;
}

}  // namespace sgboost

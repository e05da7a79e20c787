#include "sgboost/boost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "sgboost/error.hpp"

namespace sgboost {

double BinomialLoss::link(double eta) {
    if (eta >= 0.0) {
        return 1.0 / (1.0 + std::exp(-eta));
    }
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

Eigen::VectorXd BinomialLoss::negative_gradient(const Eigen::VectorXd& y, const Eigen::VectorXd& f) {
    Eigen::VectorXd u(f.size());
    for (Index i = 0; i < f.size(); ++i) {
        u(i) = y(i) - link(f(i));
    }
    return u;
}

double BinomialLoss::risk(const Eigen::VectorXd& y, const Eigen::VectorXd& f) {
    // -log h(z) = softplus(-z), evaluated without forming 1 - p; the bounds
    // are the losses at p = clamp and p = 1 - clamp.
    const double hi = -std::log(clamp);
    const double lo = -std::log1p(-clamp);
    const auto softplus = [](double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); };
    double total = 0.0;
    for (Index i = 0; i < f.size(); ++i) {
        const double pos = std::clamp(softplus(-f(i)), lo, hi);
        const double neg = std::clamp(softplus(f(i)), lo, hi);
        total += y(i) * pos + (1.0 - y(i)) * neg;
    }
    return total;
}

std::string_view to_string(OffsetMode mode) {
    return mode == OffsetMode::zero ? "zero" : "mean-link";
}

OffsetMode parse_offset_mode(std::string_view text) {
    if (text == "zero") return OffsetMode::zero;
    if (text == "mean-link") return OffsetMode::mean_link;
    fail(ErrorCode::Parse, "unknown offset mode '" + std::string(text) + "'");
}

void BoostConfig::validate() const {
    if (!(eta > 0.0 && eta < 1.0)) {
        fail(ErrorCode::InvalidArgument, "learning rate must lie strictly inside (0, 1)");
    }
    if (m_stop < 0) {
        fail(ErrorCode::InvalidArgument, "m_stop must be >= 0");
    }
}

const FittedLearner* BoostFit::find(std::string_view id) const {
    for (const auto& l : learners) {
        if (l.id == id) {
            return &l;
        }
    }
    return nullptr;
}

void StagePlan::validate() const {
    if (stages.empty()) {
        fail(ErrorCode::InvalidArgument, "stage plan has no stages");
    }
    for (const auto& stage : stages) {
        std::set<std::string> ids;
        for (const auto& l : stage.learners) {
            if (!ids.insert(l.id).second) {
                fail(ErrorCode::InvalidArgument,
                     "learner id '" + l.id + "' repeated in stage '" + stage.name + "'");
            }
        }
        if (stage.iterations && *stage.iterations < 0) {
            fail(ErrorCode::InvalidArgument, "stage '" + stage.name + "' has a negative budget");
        }
    }
}

Eigen::VectorXd pseudo_residuals(const BinaryOutcome& y, const Eigen::VectorXd& f) {
    if (y.size() != f.size()) {
        fail(ErrorCode::InvalidArgument, "outcome and predictor lengths differ");
    }
    if (!f.allFinite()) {
        fail(ErrorCode::InvalidArgument, "linear predictor has non-finite entries");
    }
    return BinomialLoss::negative_gradient(y.labels, f);
}

double init_offset(const BinaryOutcome& y, OffsetMode mode) {
    if (mode == OffsetMode::zero) {
        return 0.0;
    }
    const double ybar = y.mean();
    if (y.size() == 0 || ybar <= 0.0 || ybar >= 1.0) {
        fail(ErrorCode::DegenerateOutcome, "mean-link offset needs both classes in the outcome");
    }
    return std::log(ybar / (1.0 - ybar));
}

// ---------------------------------------------------------------------------

LearnerBank::LearnerBank(const DesignMatrix& design, std::span<const BaseLearner> learners) {
    std::vector<Index> used;
    std::vector<Index> position(static_cast<std::size_t>(design.cols()), -1);
    for (const auto& l : learners) {
        if (l.columns.empty()) {
            fail(ErrorCode::InvalidArgument, "learner '" + l.id + "' has no columns");
        }
        for (Index c : l.columns) {
            if (c < 0 || c >= design.cols()) {
                fail(ErrorCode::ColumnMismatch,
                     "learner '" + l.id + "' references column " + std::to_string(c));
            }
            if (position[static_cast<std::size_t>(c)] < 0) {
                position[static_cast<std::size_t>(c)] = static_cast<Index>(used.size());
                used.push_back(c);
            }
        }
    }
    used_.resize(design.rows(), static_cast<Index>(used.size()));
    for (std::size_t k = 0; k < used.size(); ++k) {
        used_.col(static_cast<Index>(k)) = design.values.col(used[k]);
    }

    solvers_.reserve(learners.size());
    for (const auto& l : learners) {
        Solver s;
        s.global = l.columns;
        for (Index c : l.columns) {
            s.local.push_back(position[static_cast<std::size_t>(c)]);
        }
        const Eigen::MatrixXd x = used_(Eigen::all, s.local);
        const Eigen::MatrixXd gram = x.transpose() * x;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        if (eig.info() != Eigen::Success) {
            fail(ErrorCode::NumericalFailure, "eigendecomposition failed for learner '" + l.id + "'");
        }
        const Eigen::VectorXd d = eig.eigenvalues().cwiseMax(0.0);
        const double dmax = d.maxCoeff();
        const double tol = dmax > 0.0 ? dmax * 1e-10 : std::numeric_limits<double>::min();
        Eigen::VectorXd w(d.size());
        Eigen::VectorXd q(d.size());
        for (Index i = 0; i < d.size(); ++i) {
            if (d(i) > tol) {
                w(i) = 1.0 / (d(i) + l.lambda);
                q(i) = (d(i) + 2.0 * l.lambda) * w(i) * w(i);
            } else {
                w(i) = 0.0;
                q(i) = 0.0;
            }
        }
        const auto& v = eig.eigenvectors();
        s.inverse = v * w.asDiagonal() * v.transpose();
        s.criterion = v * q.asDiagonal() * v.transpose();
        solvers_.push_back(std::move(s));
    }
}

Eigen::VectorXd LearnerBank::reductions(const Eigen::VectorXd& g) const {
    Eigen::VectorXd r(static_cast<Index>(solvers_.size()));
    for (std::size_t k = 0; k < solvers_.size(); ++k) {
        const auto& s = solvers_[k];
        if (s.local.size() == 1) {
            const double gl = g(s.local[0]);
            r(static_cast<Index>(k)) = gl * s.criterion(0, 0) * gl;
        } else {
            const Eigen::VectorXd gl = g(s.local);
            r(static_cast<Index>(k)) = gl.dot(s.criterion * gl);
        }
    }
    return r;
}

LearnerBank::Choice LearnerBank::select(const Eigen::VectorXd& u) const {
    if (solvers_.empty()) {
        fail(ErrorCode::InvalidArgument, "cannot select from an empty learner set");
    }
    if (u.size() != used_.rows()) {
        fail(ErrorCode::InvalidArgument, "target length does not match design rows");
    }
    const Eigen::VectorXd g = used_.transpose() * u;
    const Eigen::VectorXd r = reductions(g);
    std::size_t best = 0;
    for (std::size_t k = 1; k < solvers_.size(); ++k) {
        if (r(static_cast<Index>(k)) > r(static_cast<Index>(best))) {
            best = k;
        }
    }
    Choice c;
    c.index = best;
    c.sse = u.squaredNorm() - r(static_cast<Index>(best));
    const auto& s = solvers_[best];
    c.beta = s.inverse * g(s.local);
    if (!c.beta.allFinite()) {
        fail(ErrorCode::NumericalFailure, "non-finite coefficients in learner selection");
    }
    return c;
}

Eigen::VectorXd LearnerBank::sse_all(const Eigen::VectorXd& u) const {
    const Eigen::VectorXd g = used_.transpose() * u;
    return (u.squaredNorm() - reductions(g).array()).matrix();
}

Eigen::VectorXd LearnerBank::fitted(std::size_t learner, const Eigen::VectorXd& beta) const {
    const auto& s = solvers_.at(learner);
    if (s.local.size() == 1) {
        return used_.col(s.local[0]) * beta(0);
    }
    return used_(Eigen::all, s.local) * beta;
}

const std::vector<Index>& LearnerBank::columns(std::size_t learner) const {
    return solvers_.at(learner).global;
}

std::pair<std::size_t, LearnerFit> select_learner(std::span<const BaseLearner> learners,
                                                  const DesignMatrix& design,
                                                  const Eigen::VectorXd& u) {
    LearnerBank bank(design, learners);
    const auto choice = bank.select(u);
    return {choice.index, fit_learner(design, learners[choice.index], u)};
}

// ---------------------------------------------------------------------------

BoostRun::BoostRun(const DesignMatrix& design, const BinaryOutcome& y, BoostConfig config)
    : design_(&design), y_(&y), config_(config) {
    config_.validate();
    if (y.size() != design.rows()) {
        fail(ErrorCode::InvalidArgument, "outcome length does not match design rows");
    }
    fit_.offset = init_offset(y, config_.offset_mode);
    f_ = Eigen::VectorXd::Constant(design.rows(), fit_.offset);
    risk_ = BinomialLoss::risk(y.labels, f_);
    fit_.initial_risk = risk_;
}

BoostRun::BoostRun(const DesignMatrix& design, const BinaryOutcome& y, BoostConfig config,
                   const BoostFit& start)
    : design_(&design), y_(&y), config_(config), fit_(start) {
    config_.validate();
    if (y.size() != design.rows()) {
        fail(ErrorCode::InvalidArgument, "outcome length does not match design rows");
    }
    f_ = sgboost::linear_predictor(start, design);
    risk_ = BinomialLoss::risk(y.labels, f_);
    fit_.initial_risk = risk_;
    fit_.total_risk_reduction = 0.0;
    fit_.path.clear();
    for (std::size_t k = 0; k < fit_.learners.size(); ++k) {
        slot_.emplace(fit_.learners[k].id, k);
    }
}

std::size_t BoostRun::register_learner(const BaseLearner& learner, int stage) {
    std::vector<std::string> names;
    names.reserve(learner.columns.size());
    for (Index c : learner.columns) {
        names.push_back(design_->columns.at(static_cast<std::size_t>(c)).name);
    }
    auto it = slot_.find(learner.id);
    if (it != slot_.end()) {
        if (fit_.learners[it->second].column_names != names) {
            fail(ErrorCode::InvalidArgument,
                 "learner id '" + learner.id + "' reused with different columns");
        }
        return it->second;
    }
    FittedLearner fl;
    fl.id = learner.id;
    fl.kind = learner.kind;
    fl.stage = stage;
    fl.column_names = std::move(names);
    for (Index c : learner.columns) {
        fl.centers.push_back(design_->columns[static_cast<std::size_t>(c)].center);
    }
    fl.coef = Eigen::VectorXd::Zero(static_cast<Index>(learner.columns.size()));
    fit_.learners.push_back(std::move(fl));
    slot_.emplace(learner.id, fit_.learners.size() - 1);
    return fit_.learners.size() - 1;
}

void BoostRun::run_stage(std::span<const BaseLearner> learners, int stage, int iterations,
                         const std::function<void(const StepInfo&)>& observer) {
    if (iterations < 0) {
        fail(ErrorCode::InvalidArgument, "negative iteration budget");
    }
    if (learners.empty()) {
        if (iterations > 0) {
            fail(ErrorCode::InvalidArgument, "stage has iterations but no learners");
        }
        return;
    }
    std::vector<std::size_t> slots;
    slots.reserve(learners.size());
    for (const auto& l : learners) {
        slots.push_back(register_learner(l, stage));
    }
    if (iterations == 0) {
        return;
    }
    const LearnerBank bank(*design_, learners);
    const double eta = config_.eta;
    for (int m = 0; m < iterations; ++m) {
        const Eigen::VectorXd u = BinomialLoss::negative_gradient(y_->labels, f_);
        const auto choice = bank.select(u);
        const double c = config_.update_intercept ? u.mean() : 0.0;
        f_ += eta * bank.fitted(choice.index, choice.beta);
        if (c != 0.0) {
            f_.array() += eta * c;
            fit_.offset += eta * c;
        }
        auto& fl = fit_.learners[slots[choice.index]];
        fl.coef += eta * choice.beta;
        risk_ = BinomialLoss::risk(y_->labels, f_);
        fit_.path.push_back({static_cast<int>(fit_.path.size()) + 1, stage, fl.id, risk_});
        if (observer) {
            observer(StepInfo{choice.index, &choice.beta, c, eta});
        }
    }
    fit_.total_risk_reduction = fit_.initial_risk - risk_;
}

BoostFit boost(const DesignMatrix& design, const BinaryOutcome& y,
               std::span<const BaseLearner> learners, const BoostConfig& config) {
    BoostRun run(design, y, config);
    run.run_stage(learners, 0, config.m_stop);
    return run.release();
}

BoostFit k_step_boost(const DesignMatrix& design, const BinaryOutcome& y, const StagePlan& plan,
                      const BoostConfig& config) {
    plan.validate();
    for (const auto& stage : plan.stages) {
        if (!stage.iterations) {
            fail(ErrorCode::InvalidArgument,
                 "stage '" + stage.name + "' budget must be resolved before fitting");
        }
    }
    BoostRun run(design, y, config);
    for (std::size_t k = 0; k < plan.stages.size(); ++k) {
        run.run_stage(plan.stages[k].learners, static_cast<int>(k), *plan.stages[k].iterations);
    }
    return run.release();
}

Eigen::VectorXd linear_predictor(const BoostFit& fit, const DesignMatrix& design) {
    std::unordered_map<std::string_view, Index> by_name;
    by_name.reserve(design.columns.size());
    for (std::size_t j = 0; j < design.columns.size(); ++j) {
        by_name.emplace(design.columns[j].name, static_cast<Index>(j));
    }
    Eigen::VectorXd f = Eigen::VectorXd::Constant(design.rows(), fit.offset);
    for (const auto& l : fit.learners) {
        std::vector<Index> cols;
        cols.reserve(l.column_names.size());
        for (const auto& name : l.column_names) {
            auto it = by_name.find(name);
            if (it == by_name.end()) {
                fail(ErrorCode::ColumnMismatch,
                     "design lacks column '" + name + "' used by learner '" + l.id + "'");
            }
            cols.push_back(it->second);
        }
        if (!l.selected()) {
            continue;
        }
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const double b = l.coef(static_cast<Index>(k));
            if (b == 0.0) {
                continue;
            }
            const double shift = design.columns[static_cast<std::size_t>(cols[k])].center - l.centers[k];
            f.array() += (design.values.col(cols[k]).array() + shift) * b;
        }
    }
    return f;
}

Eigen::VectorXd predict(const BoostFit& fit, const DesignMatrix& design) {
    Eigen::VectorXd f = linear_predictor(fit, design);
    for (Index i = 0; i < f.size(); ++i) {
        f(i) = BinomialLoss::link(f(i));
    }
    return f;
}

}  // namespace sgboost

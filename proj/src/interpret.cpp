#include "sgboost/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "sgboost/error.hpp"

namespace sgboost {

ImportanceTable importance(const BoostFit& fit) {
    ImportanceTable table;
    if (fit.path.empty()) {
        return table;
    }
    std::unordered_map<std::string, std::size_t> row_of;
    for (const auto& l : fit.learners) {
        row_of.emplace(l.id, table.rows.size());
        table.rows.push_back({l.id, l.kind, 0.0, 0.0});
    }
    double before = fit.initial_risk;
    for (const auto& step : fit.path) {
        auto it = row_of.find(step.learner_id);
        if (it == row_of.end()) {
            fail(ErrorCode::UnknownLearner, "selection path names unregistered learner '" +
                                                step.learner_id + "'");
        }
        const double reduction = before - step.risk_after;
        table.rows[it->second].absolute += reduction;
        table.total_reduction += reduction;
        before = step.risk_after;
    }
    if (table.total_reduction > 0.0) {
        for (auto& row : table.rows) {
            row.relative = row.absolute / table.total_reduction;
        }
    }
    return table;
}

std::vector<OddsRatio> odds_ratios(const BoostFit& fit) {
    std::vector<OddsRatio> out;
    for (const auto& l : fit.learners) {
        for (std::size_t k = 0; k < l.column_names.size(); ++k) {
            const double b = l.coef(static_cast<Index>(k));
            out.push_back({l.id, l.column_names[k], b, std::exp(b)});
        }
    }
    return out;
}

namespace {

const FittedLearner& find_learner(const BoostFit& fit, std::string_view id) {
    const auto* l = fit.find(id);
    if (l == nullptr) {
        fail(ErrorCode::UnknownLearner, "fit has no learner '" + std::string(id) + "'");
    }
    return *l;
}

std::vector<Index> resolve(const FittedLearner& l, const DesignMatrix& design) {
    std::vector<Index> cols;
    for (const auto& name : l.column_names) {
        auto j = design.find(name);
        if (!j) {
            fail(ErrorCode::ColumnMismatch,
                 "design lacks column '" + name + "' used by learner '" + l.id + "'");
        }
        cols.push_back(*j);
    }
    return cols;
}

// Per-row contribution of a learner: sum_k (raw - fit center) * coef.
Eigen::VectorXd contribution(const FittedLearner& l, const DesignMatrix& design,
                             const std::vector<Index>& cols) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(design.rows());
    for (std::size_t k = 0; k < cols.size(); ++k) {
        const double shift = design.columns[static_cast<std::size_t>(cols[k])].center - l.centers[k];
        c.array() += (design.values.col(cols[k]).array() + shift) * l.coef(static_cast<Index>(k));
    }
    return c;
}

double point_contribution(const FittedLearner& l, const std::vector<double>& raw) {
    double c = 0.0;
    for (std::size_t k = 0; k < raw.size(); ++k) {
        c += (raw[k] - l.centers[k]) * l.coef(static_cast<Index>(k));
    }
    return c;
}

std::string format_value(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        return std::to_string(static_cast<long long>(v));
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

std::vector<std::vector<double>> default_grid(const BoostFit& fit, const DesignMatrix& design,
                                              std::string_view learner_id) {
    const auto& l = find_learner(fit, learner_id);
    const auto cols = resolve(l, design);
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(design.rows()));
    for (Index i = 0; i < design.rows(); ++i) {
        auto& r = rows[static_cast<std::size_t>(i)];
        for (Index c : cols) {
            r.push_back(design.values(i, c) + design.columns[static_cast<std::size_t>(c)].center);
        }
    }
    std::vector<std::vector<double>> distinct = rows;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    constexpr std::size_t kMaxDistinct = 64;
    if (distinct.size() <= kMaxDistinct) {
        return distinct;
    }
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ranked.emplace_back(point_contribution(l, rows[i]), i);
    }
    std::sort(ranked.begin(), ranked.end());
    std::vector<std::vector<double>> out;
    constexpr int kQuantiles = 21;
    for (int q = 0; q < kQuantiles; ++q) {
        const auto pos = static_cast<std::size_t>(
            std::llround(static_cast<double>(q) / (kQuantiles - 1) * static_cast<double>(ranked.size() - 1)));
        out.push_back(rows[ranked[pos].second]);
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

PartialEffectGrid partial_effects(const BoostFit& fit, const DesignMatrix& design,
                                  std::string_view learner_id,
                                  const std::vector<std::vector<double>>& grid) {
    const auto& target = find_learner(fit, learner_id);
    PartialEffectGrid out;
    out.learner_id = target.id;
    out.columns = target.column_names;
    out.baseline = fit.offset;
    for (const auto& l : fit.learners) {
        const auto cols = resolve(l, design);
        if (&l == &target || !l.selected() || design.rows() == 0) {
            continue;
        }
        out.baseline += contribution(l, design, cols).mean();
    }
    for (const auto& raw : grid) {
        if (raw.size() != target.column_names.size()) {
            fail(ErrorCode::InvalidArgument, "grid point has " + std::to_string(raw.size()) +
                                                 " values, learner '" + target.id + "' has " +
                                                 std::to_string(target.column_names.size()) +
                                                 " columns");
        }
        PartialEffectPoint p;
        p.raw = raw;
        for (std::size_t k = 0; k < raw.size(); ++k) {
            const auto& name = target.column_names[k];
            const bool indicator = name.find('=') != std::string::npos && (raw[k] == 0.0 || raw[k] == 1.0);
            if (indicator && raw[k] == 0.0) {
                continue;
            }
            if (!p.label.empty()) {
                p.label += ";";
            }
            p.label += indicator ? name : name + "=" + format_value(raw[k]);
        }
        if (p.label.empty()) {
            p.label = "reference";
        }
        p.contribution = point_contribution(target, raw);
        p.probability = BinomialLoss::link(out.baseline + p.contribution);
        out.points.push_back(std::move(p));
    }
    return out;
}

PartialEffectGrid partial_effects(const BoostFit& fit, const DesignMatrix& design,
                                  std::string_view learner_id) {
    return partial_effects(fit, design, learner_id, default_grid(fit, design, learner_id));
}

// ---------------------------------------------------------------------------

namespace {

struct ProbeVariable {
    const VariableSpec* spec = nullptr;
    std::vector<int> category;  // per table row
};

ProbeVariable probe_variable(const Table& raw, const DatasetSchema& schema, std::string_view name) {
    ProbeVariable v;
    v.spec = &schema.variable(name);
    if (v.spec->kind == VariableKind::continuous) {
        fail(ErrorCode::InvalidArgument,
             "interaction probe needs categorical variables; '" + v.spec->name + "' is continuous");
    }
    const std::size_t col = raw.column(name);
    for (std::size_t i = 0; i < raw.row_count(); ++i) {
        const auto& cell = raw.rows[i][col];
        auto it = std::find(v.spec->categories.begin(), v.spec->categories.end(), cell);
        if (it == v.spec->categories.end()) {
            fail(ErrorCode::UnknownCategory, "row " + std::to_string(i + 1) + ", column '" +
                                                 v.spec->name + "': '" + cell + "'");
        }
        v.category.push_back(static_cast<int>(it - v.spec->categories.begin()));
    }
    return v;
}

ProbeStratum probe_stratum(std::string name, const std::vector<std::size_t>& rows,
                           const ProbeVariable& mod, const ProbeVariable& partner,
                           const Eigen::VectorXd& y_all, const ProbeOptions& options) {
    const int a = static_cast<int>(mod.spec->categories.size());
    const int b = static_cast<int>(partner.spec->categories.size());
    ProbeStratum s;
    s.name = std::move(name);
    for (int i = 0; i < a; ++i) {
        for (int j = 0; j < b; ++j) {
            s.cells.push_back({mod.spec->categories[static_cast<std::size_t>(i)],
                               partner.spec->categories[static_cast<std::size_t>(j)], 0, 0,
                               std::numeric_limits<double>::quiet_NaN()});
        }
    }
    for (std::size_t r : rows) {
        auto& cell = s.cells[static_cast<std::size_t>(mod.category[r] * b + partner.category[r])];
        ++cell.n;
        cell.positives += y_all(static_cast<Index>(r)) > 0.5 ? 1 : 0;
    }
    if (std::any_of(s.cells.begin(), s.cells.end(), [](const ProbeCell& c) { return c.n == 0; })) {
        s.status = "empty_cell";
        return s;
    }

    // Design row for joint category (i, j).
    const Index p = 1 + (options.main_effects ? (a - 1) + (b - 1) : 0) + (a - 1) * (b - 1);
    auto design_row = [&](int i, int j) {
        Eigen::RowVectorXd x = Eigen::RowVectorXd::Zero(p);
        x(0) = 1.0;
        Index k = 1;
        if (options.main_effects) {
            if (i > 0) x(k + i - 1) = 1.0;
            k += a - 1;
            if (j > 0) x(k + j - 1) = 1.0;
            k += b - 1;
        }
        if (i > 0 && j > 0) {
            x(k + (i - 1) * (b - 1) + (j - 1)) = 1.0;
        }
        return x;
    };
    Eigen::MatrixXd x(static_cast<Index>(rows.size()), p);
    Eigen::VectorXd y(static_cast<Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        x.row(static_cast<Index>(k)) = design_row(mod.category[rows[k]], partner.category[rows[k]]);
        y(static_cast<Index>(k)) = y_all(static_cast<Index>(rows[k]));
    }
    const auto fit = fit_logistic_irls(x, y, options.logistic);
    s.converged = fit.usable();
    if (!fit.converged) {
        s.status = "non_convergence";
        return s;
    }
    if (fit.separated) {
        s.status = "separation";
        return s;
    }
    s.status = "ok";
    for (int i = 0; i < a; ++i) {
        for (int j = 0; j < b; ++j) {
            s.cells[static_cast<std::size_t>(i * b + j)].probability =
                BinomialLoss::link(design_row(i, j).dot(fit.beta));
        }
    }
    return s;
}

}  // namespace

ProbeResult interaction_probe(const Table& raw, const DatasetSchema& schema,
                              std::string_view moderator, std::string_view partner,
                              const std::optional<std::string>& strata_column,
                              const ProbeOptions& options) {
    if (moderator == partner) {
        fail(ErrorCode::InvalidArgument, "moderator and partner must differ");
    }
    const auto mod = probe_variable(raw, schema, moderator);
    const auto par = probe_variable(raw, schema, partner);
    const BinaryOutcome y = encode_outcome(schema, raw);

    ProbeResult result;
    result.moderator = std::string(moderator);
    result.partner = std::string(partner);

    if (strata_column) {
        const std::size_t col = raw.column(*strata_column);
        std::vector<std::string> levels;
        if (auto v = schema.find(*strata_column); v && !schema.variables[*v].categories.empty()) {
            levels = schema.variables[*v].categories;
        }
        for (const auto& row : raw.rows) {
            if (std::find(levels.begin(), levels.end(), row[col]) == levels.end()) {
                levels.push_back(row[col]);
            }
        }
        for (const auto& level : levels) {
            std::vector<std::size_t> rows;
            for (std::size_t i = 0; i < raw.row_count(); ++i) {
                if (raw.rows[i][col] == level) {
                    rows.push_back(i);
                }
            }
            if (rows.empty()) {
                continue;
            }
            result.strata.push_back(probe_stratum(level, rows, mod, par, y.labels, options));
        }
    }
    std::vector<std::size_t> all(raw.row_count());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    result.strata.push_back(probe_stratum("pooled", all, mod, par, y.labels, options));
    return result;
}

}  // namespace sgboost

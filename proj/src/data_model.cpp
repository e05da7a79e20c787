#include "sgboost/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "sgboost/error.hpp"

namespace sgboost {

std::string_view to_string(VariableKind kind) {
    switch (kind) {
        case VariableKind::binary: return "binary";
        case VariableKind::categorical: return "categorical";
        case VariableKind::continuous: return "continuous";
    }
    return "unknown";
}

VariableKind parse_variable_kind(std::string_view text) {
    if (text == "binary") return VariableKind::binary;
    if (text == "categorical") return VariableKind::categorical;
    if (text == "continuous") return VariableKind::continuous;
    fail(ErrorCode::Parse, "unknown variable kind '" + std::string(text) + "'");
}

namespace {

constexpr std::string_view kReservedChars = ":*=";

bool is_missing(std::string_view v) { return v.empty() || v == "NA" || v == "NaN"; }

double parse_number(const std::string& text, const std::string& column, std::size_t row) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first < last && *first == ' ') ++first;
    while (last > first && last[-1] == ' ') --last;
    if (first < last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
        fail(ErrorCode::Parse, "row " + std::to_string(row + 1) + ", column '" + column +
                                   "': '" + text + "' is not a finite number");
    }
    return value;
}

void center_columns(Eigen::MatrixXd& values, std::vector<ColumnMeta>& meta) {
    for (Index j = 0; j < values.cols(); ++j) {
        const double c = values.rows() > 0 ? values.col(j).mean() : 0.0;
        values.col(j).array() -= c;
        meta[static_cast<std::size_t>(j)].center = c;
    }
}

bool is_constant(const Eigen::Ref<const Eigen::VectorXd>& column) {
    return column.size() == 0 || (column.array() == column(0)).all();
}

}  // namespace

void DatasetSchema::validate() const {
    if (outcome.name.empty()) {
        fail(ErrorCode::InvalidArgument, "schema has no outcome name");
    }
    if (outcome.positive == outcome.negative) {
        fail(ErrorCode::InvalidArgument, "outcome positive and negative labels must differ");
    }
    if (variables.empty()) {
        fail(ErrorCode::InvalidArgument, "schema lists no predictors");
    }
    std::set<std::string> names;
    for (const auto& v : variables) {
        if (v.name.empty()) {
            fail(ErrorCode::InvalidArgument, "variable with empty name");
        }
        if (v.name.find_first_of(kReservedChars) != std::string::npos) {
            fail(ErrorCode::InvalidArgument,
                 "variable name '" + v.name + "' contains one of the reserved characters ':*='");
        }
        if (!names.insert(v.name).second) {
            fail(ErrorCode::InvalidArgument, "duplicate variable '" + v.name + "'");
        }
        if (v.name == outcome.name) {
            fail(ErrorCode::InvalidArgument, "outcome '" + v.name + "' listed among predictors");
        }
        if (v.group.empty()) {
            fail(ErrorCode::InvalidArgument, "variable '" + v.name + "' has no group");
        }
        const auto k = v.categories.size();
        const bool ok = (v.kind == VariableKind::binary && k == 2) ||
                        (v.kind == VariableKind::categorical && k >= 2) ||
                        (v.kind == VariableKind::continuous && k == 0);
        if (!ok) {
            fail(ErrorCode::InvalidArgument,
                 "variable '" + v.name + "' of kind " + std::string(to_string(v.kind)) + " has " +
                     std::to_string(k) + " categories");
        }
        std::set<std::string> cats(v.categories.begin(), v.categories.end());
        if (cats.size() != k) {
            fail(ErrorCode::InvalidArgument, "variable '" + v.name + "' repeats a category");
        }
    }
}

std::optional<std::size_t> DatasetSchema::find(std::string_view name) const {
    for (std::size_t i = 0; i < variables.size(); ++i) {
        if (variables[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

const VariableSpec& DatasetSchema::variable(std::string_view name) const {
    auto i = find(name);
    if (!i) {
        fail(ErrorCode::InvalidArgument, "unknown variable '" + std::string(name) + "'");
    }
    return variables[*i];
}

std::vector<std::string> DatasetSchema::groups() const {
    std::vector<std::string> out;
    for (const auto& v : variables) {
        if (std::find(out.begin(), out.end(), v.group) == out.end()) {
            out.push_back(v.group);
        }
    }
    return out;
}

std::size_t DatasetSchema::moderator_count() const {
    return static_cast<std::size_t>(
        std::count_if(variables.begin(), variables.end(), [](const auto& v) { return v.is_moderator; }));
}

std::optional<Index> DesignMatrix::find(std::string_view column_name) const {
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].name == column_name) {
            return static_cast<Index>(j);
        }
    }
    return std::nullopt;
}

std::vector<Index> DesignMatrix::term_columns(std::string_view term) const {
    std::vector<Index> out;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].term == term) {
            out.push_back(static_cast<Index>(j));
        }
    }
    return out;
}

Eigen::VectorXd DesignMatrix::raw_column(Index j) const {
    return values.col(j).array() + columns[static_cast<std::size_t>(j)].center;
}

DesignMatrix DesignMatrix::subset(std::span<const Index> rows) const {
    DesignMatrix out;
    out.columns = columns;
    out.values.resize(static_cast<Index>(rows.size()), cols());
    for (Index j = 0; j < cols(); ++j) {
        const double c = columns[static_cast<std::size_t>(j)].center;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out.values(static_cast<Index>(i), j) = values(rows[i], j) + c;
        }
    }
    center_columns(out.values, out.columns);
    return out;
}

Index BinaryOutcome::positives() const {
    return static_cast<Index>((labels.array() > 0.5).count());
}

double BinaryOutcome::mean() const { return labels.size() > 0 ? labels.mean() : 0.0; }

BinaryOutcome BinaryOutcome::subset(std::span<const Index> rows) const {
    BinaryOutcome out;
    out.positive_meaning = positive_meaning;
    out.labels.resize(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.labels(static_cast<Index>(i)) = labels(rows[i]);
    }
    return out;
}

DesignMatrix encode_predictors(const DatasetSchema& schema, const Table& raw) {
    schema.validate();
    const auto n = static_cast<Index>(raw.row_count());

    std::vector<std::size_t> source(schema.variables.size());
    Index p = 0;
    for (std::size_t v = 0; v < schema.variables.size(); ++v) {
        source[v] = raw.column(schema.variables[v].name);
        const auto& spec = schema.variables[v];
        p += spec.kind == VariableKind::continuous ? 1 : static_cast<Index>(spec.categories.size()) - 1;
    }

    DesignMatrix design;
    design.values = Eigen::MatrixXd::Zero(n, p);
    design.columns.reserve(static_cast<std::size_t>(p));

    Index col = 0;
    for (std::size_t v = 0; v < schema.variables.size(); ++v) {
        const auto& spec = schema.variables[v];
        const std::size_t src = source[v];
        if (spec.kind == VariableKind::continuous) {
            for (Index i = 0; i < n; ++i) {
                const auto& cell = raw.rows[static_cast<std::size_t>(i)][src];
                if (is_missing(cell)) {
                    fail(ErrorCode::MissingValue, "row " + std::to_string(i + 1) + ", column '" +
                                                      spec.name + "' is missing");
                }
                design.values(i, col) = parse_number(cell, spec.name, static_cast<std::size_t>(i));
            }
            design.columns.push_back({spec.name, spec.name, {spec.name}, {}, 0.0, false});
            ++col;
            continue;
        }
        const Index first = col;
        for (std::size_t k = 1; k < spec.categories.size(); ++k) {
            design.columns.push_back({spec.name + "=" + spec.categories[k],
                                      spec.name,
                                      {spec.name},
                                      {spec.categories[k]},
                                      0.0,
                                      false});
        }
        for (Index i = 0; i < n; ++i) {
            const auto& cell = raw.rows[static_cast<std::size_t>(i)][src];
            if (is_missing(cell)) {
                fail(ErrorCode::MissingValue,
                     "row " + std::to_string(i + 1) + ", column '" + spec.name + "' is missing");
            }
            auto it = std::find(spec.categories.begin(), spec.categories.end(), cell);
            if (it == spec.categories.end()) {
                fail(ErrorCode::UnknownCategory, "row " + std::to_string(i + 1) + ", column '" +
                                                     spec.name + "': '" + cell +
                                                     "' is not a listed category");
            }
            const auto k = it - spec.categories.begin();
            if (k > 0) {
                design.values(i, first + k - 1) = 1.0;
            }
        }
        col += static_cast<Index>(spec.categories.size()) - 1;
    }

    for (Index j = 0; j < p; ++j) {
        if (is_constant(design.values.col(j))) {
            fail(ErrorCode::DegenerateColumn,
                 "column '" + design.columns[static_cast<std::size_t>(j)].name +
                     "' is constant in the data");
        }
    }
    center_columns(design.values, design.columns);
    return design;
}

BinaryOutcome encode_outcome(const DatasetSchema& schema, const Table& raw) {
    const std::size_t src = raw.column(schema.outcome.name);
    BinaryOutcome y;
    y.positive_meaning = schema.outcome.positive;
    y.labels.resize(static_cast<Index>(raw.row_count()));
    for (std::size_t i = 0; i < raw.row_count(); ++i) {
        const auto& cell = raw.rows[i][src];
        if (cell == schema.outcome.positive) {
            y.labels(static_cast<Index>(i)) = 1.0;
        } else if (cell == schema.outcome.negative) {
            y.labels(static_cast<Index>(i)) = 0.0;
        } else {
            fail(ErrorCode::NonBinaryOutcome, "row " + std::to_string(i + 1) + ": outcome value '" +
                                                  cell + "' is neither '" + schema.outcome.positive +
                                                  "' nor '" + schema.outcome.negative + "'");
        }
    }
    return y;
}

EncodedData encode(const DatasetSchema& schema, const Table& raw) {
    EncodedData out;
    out.design = encode_predictors(schema, raw);
    out.outcome = encode_outcome(schema, raw);
    return out;
}

std::vector<InteractionTerm> expand_interactions(const DatasetSchema& schema,
                                                 const DesignMatrix& design) {
    if (schema.moderator_count() == 0) {
        fail(ErrorCode::InvalidArgument, "schema flags no moderators");
    }
    std::vector<InteractionTerm> terms;
    const auto& vars = schema.variables;
    for (std::size_t m = 0; m < vars.size(); ++m) {
        if (!vars[m].is_moderator) {
            continue;
        }
        const auto mod_cols = design.term_columns(vars[m].name);
        if (mod_cols.empty()) {
            fail(ErrorCode::ColumnMismatch, "design has no columns for '" + vars[m].name + "'");
        }
        for (std::size_t v = 0; v < vars.size(); ++v) {
            if (v == m || (vars[v].is_moderator && v < m)) {
                continue;
            }
            const auto partner_cols = design.term_columns(vars[v].name);
            if (partner_cols.empty()) {
                fail(ErrorCode::ColumnMismatch, "design has no columns for '" + vars[v].name + "'");
            }
            InteractionTerm term;
            term.moderator = vars[m].name;
            term.partner = vars[v].name;
            term.columns.resize(design.rows(),
                                static_cast<Index>(mod_cols.size() * partner_cols.size()));
            Index k = 0;
            for (Index a : mod_cols) {
                const auto& ma = design.columns[static_cast<std::size_t>(a)];
                const Eigen::VectorXd raw_a = design.raw_column(a);
                for (Index b : partner_cols) {
                    const auto& mb = design.columns[static_cast<std::size_t>(b)];
                    term.columns.col(k) = raw_a.cwiseProduct(design.raw_column(b));
                    ColumnMeta meta;
                    meta.name = ma.name + "*" + mb.name;
                    meta.term = term.id();
                    meta.sources = {term.moderator, term.partner};
                    meta.categories = {ma.categories.empty() ? std::string() : ma.categories[0],
                                       mb.categories.empty() ? std::string() : mb.categories[0]};
                    meta.is_interaction = true;
                    term.meta.push_back(std::move(meta));
                    ++k;
                }
            }
            center_columns(term.columns, term.meta);
            terms.push_back(std::move(term));
        }
    }
    return terms;
}

DesignMatrix append_interactions(const DesignMatrix& design,
                                 std::span<const InteractionTerm> terms) {
    Index extra = 0;
    for (const auto& t : terms) {
        if (t.columns.rows() != design.rows()) {
            fail(ErrorCode::ColumnMismatch, "interaction term '" + t.id() + "' has " +
                                                std::to_string(t.columns.rows()) + " rows, design has " +
                                                std::to_string(design.rows()));
        }
        extra += t.columns.cols();
    }
    DesignMatrix out;
    out.values.resize(design.rows(), design.cols() + extra);
    out.values.leftCols(design.cols()) = design.values;
    out.columns = design.columns;
    Index col = design.cols();
    for (const auto& t : terms) {
        out.values.middleCols(col, t.columns.cols()) = t.columns;
        out.columns.insert(out.columns.end(), t.meta.begin(), t.meta.end());
        col += t.columns.cols();
    }
    return out;
}

std::vector<GroupColumns> column_group_index(const DatasetSchema& schema,
                                             const DesignMatrix& design) {
    std::vector<GroupColumns> out;
    for (const auto& group : schema.groups()) {
        GroupColumns g;
        g.group = group;
        for (const auto& v : schema.variables) {
            if (v.group != group) {
                continue;
            }
            auto cols = design.term_columns(v.name);
            if (cols.empty()) {
                fail(ErrorCode::ColumnMismatch, "design has no columns for '" + v.name + "'");
            }
            g.variables.push_back(v.name);
            g.columns.insert(g.columns.end(), cols.begin(), cols.end());
        }
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace sgboost

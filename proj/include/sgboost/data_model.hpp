#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sgboost/table.hpp"

namespace sgboost {

using Index = Eigen::Index;

enum class VariableKind { binary, categorical, continuous };

std::string_view to_string(VariableKind kind);
VariableKind parse_variable_kind(std::string_view text);

struct VariableSpec {
    std::string name;
    VariableKind kind = VariableKind::binary;
    /// Ordered; the first category is the reference cell. Empty for continuous.
    std::vector<std::string> categories;
    std::string group;
    bool is_moderator = false;
};

struct OutcomeSpec {
    std::string name;
    std::string positive = "1";
    std::string negative = "0";
};

struct DatasetSchema {
    std::vector<VariableSpec> variables;
    OutcomeSpec outcome;

    /// Throws InvalidArgument on duplicate names, bad category counts,
    /// reserved characters in names or an outcome listed as a predictor.
    void validate() const;

    const VariableSpec& variable(std::string_view name) const;
    std::optional<std::size_t> find(std::string_view name) const;
    /// Group labels in order of first appearance.
    std::vector<std::string> groups() const;
    std::size_t moderator_count() const;
};

/// Per-column bookkeeping of the encoded design.
struct ColumnMeta {
    /// Unique column label, e.g. "Natural assets=SouthernChile" or
    /// "Gender=M*Education=yes" for product columns.
    std::string name;
    /// Block the column belongs to: the variable name for main effects,
    /// "moderator:partner" for interaction products.
    std::string term;
    std::vector<std::string> sources;
    std::vector<std::string> categories;
    /// Raw value = centered value + center.
    double center = 0.0;
    bool is_interaction = false;
};

/// Mean-centered numeric design with column metadata. Centering is always
/// relative to the rows held by the matrix; subset() re-centers.
struct DesignMatrix {
    Eigen::MatrixXd values;
    std::vector<ColumnMeta> columns;

    Index rows() const { return values.rows(); }
    Index cols() const { return values.cols(); }

    std::optional<Index> find(std::string_view column_name) const;
    /// Column indices of a term block in column order.
    std::vector<Index> term_columns(std::string_view term) const;
    /// Un-centered column j.
    Eigen::VectorXd raw_column(Index j) const;

    /// Rows in the given order, columns re-centered on the subset so the
    /// stored centers still reproduce the raw values.
    DesignMatrix subset(std::span<const Index> rows) const;
};

struct BinaryOutcome {
    Eigen::VectorXd labels;
    std::string positive_meaning;

    Index size() const { return labels.size(); }
    Index positives() const;
    double mean() const;
    BinaryOutcome subset(std::span<const Index> rows) const;
};

/// A moderator x partner product block. Columns are products of the
/// un-centered parent columns, centered afterwards.
struct InteractionTerm {
    std::string moderator;
    std::string partner;
    std::vector<ColumnMeta> meta;
    Eigen::MatrixXd columns;

    std::string id() const { return moderator + ":" + partner; }
};

struct EncodedData {
    DesignMatrix design;
    BinaryOutcome outcome;
};

/// Reference-cell coding in schema order, centered; rejects missing values,
/// unknown categories and columns that would be constant.
EncodedData encode(const DatasetSchema& schema, const Table& raw);

/// Encodes predictors only (no outcome column required).
DesignMatrix encode_predictors(const DatasetSchema& schema, const Table& raw);

BinaryOutcome encode_outcome(const DatasetSchema& schema, const Table& raw);

/// One term per unordered (moderator, partner) pair over all other
/// predictors; pairs of two moderators appear once, under the moderator
/// listed first in the schema.
std::vector<InteractionTerm> expand_interactions(const DatasetSchema& schema,
                                                 const DesignMatrix& design);

/// Design with the interaction product columns appended.
DesignMatrix append_interactions(const DesignMatrix& design,
                                 std::span<const InteractionTerm> terms);

struct GroupColumns {
    std::string group;
    std::vector<std::string> variables;
    std::vector<Index> columns;
};

/// Main-effect columns of each schema group, groups in schema order.
std::vector<GroupColumns> column_group_index(const DatasetSchema& schema,
                                             const DesignMatrix& design);

}  // namespace sgboost

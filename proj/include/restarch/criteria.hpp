#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace restarch {

enum class CompareOp { EQ, NEQ, LT, GT, LE, GE, LIKE };
enum class Combinator { AND, OR };

std::string_view to_string(CompareOp op);
std::string_view to_string(Combinator c);
std::optional<CompareOp> parse_compare_op(std::string_view s);
std::optional<Combinator> parse_combinator(std::string_view s);

/// One (schema_field, operator, value) search constraint.
struct Constraint {
    std::string schema_field;  // "datatype/FIELD"
    CompareOp op = CompareOp::EQ;
    std::string value;

    std::string datatype() const;
    std::string field() const;

    bool operator==(const Constraint&) const = default;
};

struct CriteriaItem;

/// Boolean tree of constraints. Items are never empty once validated.
struct CriteriaSet {
    Combinator method = Combinator::AND;
    std::vector<CriteriaItem> items;

    CriteriaSet() = default;
    CriteriaSet(Combinator m, std::vector<CriteriaItem> its);

    bool operator==(const CriteriaSet& other) const;

    /// Leaves in document order.
    std::vector<Constraint> constraints() const;
    std::size_t depth() const;

    /// Throws CriteriaError on empty sets or malformed schema fields.
    void validate() const;
};

struct CriteriaItem {
    std::variant<Constraint, CriteriaSet> node;

    CriteriaItem(Constraint c) : node(std::move(c)) {}   // NOLINT(google-explicit-constructor)
    CriteriaItem(CriteriaSet s) : node(std::move(s)) {}  // NOLINT(google-explicit-constructor)

    bool operator==(const CriteriaItem& other) const { return node == other.node; }
};

/// Nested-list form: `[["a/B", "=", "x"], [..nested.., "OR"], "AND"]`.
/// The last element names the combinator; every other element is either a
/// 3-element constraint or a nested list.
CriteriaSet parse_criteria(const nlohmann::json& nested);
CriteriaSet parse_criteria(std::string_view json_text);
inline CriteriaSet parse_criteria(const std::string& json_text) { return parse_criteria(std::string_view(json_text)); }
inline CriteriaSet parse_criteria(const char* json_text) { return parse_criteria(std::string_view(json_text)); }
nlohmann::json to_nested_list(const CriteriaSet& set);

/// Typed comparison: numeric when both sides parse as decimal numbers,
/// lexicographic otherwise. LIKE is always textual, `%` matching any run
/// and everything else literal; the whole value must match.
bool compare_values(std::string_view lhs, CompareOp op, std::string_view rhs);

std::optional<double> parse_decimal(std::string_view s);

/// Numbers first in numeric order, then the rest lexicographically.
bool value_order_less(std::string_view a, std::string_view b);

/// Every placeholder key: the set of constraint values.
std::set<std::string> placeholder_keys(const CriteriaSet& set);

}  // namespace restarch

#include "restarch/criteria.hpp"

#include <algorithm>
#include <charconv>
#include <regex>

#include "restarch/error.hpp"

namespace restarch {

std::string_view to_string(CompareOp op) {
    switch (op) {
        case CompareOp::EQ: return "=";
        case CompareOp::NEQ: return "!=";
        case CompareOp::LT: return "<";
        case CompareOp::GT: return ">";
        case CompareOp::LE: return "<=";
        case CompareOp::GE: return ">=";
        case CompareOp::LIKE: return "LIKE";
    }
    return "?";
}

std::string_view to_string(Combinator c) { return c == Combinator::AND ? "AND" : "OR"; }

std::optional<CompareOp> parse_compare_op(std::string_view s) {
    for (auto op : {CompareOp::EQ, CompareOp::NEQ, CompareOp::LT, CompareOp::GT, CompareOp::LE, CompareOp::GE,
                    CompareOp::LIKE}) {
        if (to_string(op) == s) return op;
    }
    if (s == "like") return CompareOp::LIKE;
    return std::nullopt;
}

std::optional<Combinator> parse_combinator(std::string_view s) {
    if (s == "AND" || s == "and") return Combinator::AND;
    if (s == "OR" || s == "or") return Combinator::OR;
    return std::nullopt;
}

std::string Constraint::datatype() const {
    auto slash = schema_field.find('/');
    return schema_field.substr(0, slash);
}

std::string Constraint::field() const {
    auto slash = schema_field.find('/');
    return slash == std::string::npos ? std::string() : schema_field.substr(slash + 1);
}

CriteriaSet::CriteriaSet(Combinator m, std::vector<CriteriaItem> its) : method(m), items(std::move(its)) {}

bool CriteriaSet::operator==(const CriteriaSet& other) const {
    return method == other.method && items == other.items;
}

std::vector<Constraint> CriteriaSet::constraints() const {
    std::vector<Constraint> out;
    for (const auto& item : items) {
        if (const auto* c = std::get_if<Constraint>(&item.node)) {
            out.push_back(*c);
        } else {
            auto sub = std::get<CriteriaSet>(item.node).constraints();
            out.insert(out.end(), sub.begin(), sub.end());
        }
    }
    return out;
}

std::size_t CriteriaSet::depth() const {
    std::size_t d = 0;
    for (const auto& item : items) {
        if (const auto* s = std::get_if<CriteriaSet>(&item.node)) d = std::max(d, s->depth());
    }
    return d + 1;
}

void CriteriaSet::validate() const {
    if (items.empty()) throw CriteriaError("criteria set has no constraints");
    for (const auto& item : items) {
        if (const auto* c = std::get_if<Constraint>(&item.node)) {
            auto slash = c->schema_field.find('/');
            if (slash == std::string::npos || slash == 0 || slash + 1 == c->schema_field.size() ||
                c->schema_field.find('/', slash + 1) != std::string::npos) {
                throw CriteriaError("schema field '" + c->schema_field + "' must look like 'datatype/FIELD'");
            }
        } else {
            std::get<CriteriaSet>(item.node).validate();
        }
    }
}

namespace {

Constraint parse_constraint(const nlohmann::json& t) {
    if (!t.is_array() || t.size() != 3) {
        throw CriteriaError("constraint must have 3 elements: " + t.dump());
    }
    for (const auto& part : t) {
        if (!part.is_string()) throw CriteriaError("constraint elements must be strings: " + t.dump());
    }
    auto op = parse_compare_op(t[1].get<std::string>());
    if (!op) throw CriteriaError("unknown operator '" + t[1].get<std::string>() + "'");
    return Constraint{t[0].get<std::string>(), *op, t[2].get<std::string>()};
}

CriteriaSet parse_set(const nlohmann::json& list) {
    if (!list.is_array() || list.empty()) throw CriteriaError("criteria must be a non-empty list");
    const auto& last = list.back();
    if (!last.is_string()) throw CriteriaError("criteria list must end with \"AND\" or \"OR\": " + list.dump());
    auto method = parse_combinator(last.get<std::string>());
    if (!method) throw CriteriaError("unknown combinator '" + last.get<std::string>() + "'");
    CriteriaSet set;
    set.method = *method;
    for (std::size_t i = 0; i + 1 < list.size(); ++i) {
        const auto& el = list[i];
        if (!el.is_array() || el.empty()) throw CriteriaError("criteria element must be a list: " + el.dump());
        // A constraint starts with a string; a nested set starts with a list.
        if (el.front().is_string() && !(el.size() == 1)) {
            set.items.emplace_back(parse_constraint(el));
        } else {
            set.items.emplace_back(parse_set(el));
        }
    }
    set.validate();
    return set;
}

}  // namespace

CriteriaSet parse_criteria(const nlohmann::json& nested) { return parse_set(nested); }

CriteriaSet parse_criteria(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw CriteriaError(std::string("criteria is not valid JSON: ") + e.what());
    }
    return parse_set(doc);
}

nlohmann::json to_nested_list(const CriteriaSet& set) {
    auto out = nlohmann::json::array();
    for (const auto& item : set.items) {
        if (const auto* c = std::get_if<Constraint>(&item.node)) {
            out.push_back({c->schema_field, std::string(to_string(c->op)), c->value});
        } else {
            out.push_back(to_nested_list(std::get<CriteriaSet>(item.node)));
        }
    }
    out.push_back(std::string(to_string(set.method)));
    return out;
}

std::optional<double> parse_decimal(std::string_view s) {
    static const std::regex re(R"(^[+-]?([0-9]+(\.[0-9]*)?|\.[0-9]+)$)");
    if (s.empty() || !std::regex_match(s.begin(), s.end(), re)) return std::nullopt;
    return std::stod(std::string(s));
}

namespace {

bool like_match(std::string_view pattern, std::string_view text) {
    std::size_t p = 0, t = 0;
    std::size_t star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && pattern[p] == '%') {
            star = p++;
            mark = t;
        } else if (p < pattern.size() && pattern[p] == text[t]) {
            ++p;
            ++t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '%') ++p;
    return p == pattern.size();
}

}  // namespace

bool compare_values(std::string_view lhs, CompareOp op, std::string_view rhs) {
    if (op == CompareOp::LIKE) return like_match(rhs, lhs);
    int cmp;
    auto a = parse_decimal(lhs);
    auto b = parse_decimal(rhs);
    if (a && b) {
        cmp = *a < *b ? -1 : (*a > *b ? 1 : 0);
    } else {
        auto c = lhs.compare(rhs);
        cmp = c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    switch (op) {
        case CompareOp::EQ: return cmp == 0;
        case CompareOp::NEQ: return cmp != 0;
        case CompareOp::LT: return cmp < 0;
        case CompareOp::GT: return cmp > 0;
        case CompareOp::LE: return cmp <= 0;
        case CompareOp::GE: return cmp >= 0;
        case CompareOp::LIKE: break;
    }
    return false;
}

bool value_order_less(std::string_view a, std::string_view b) {
    auto x = parse_decimal(a);
    auto y = parse_decimal(b);
    if (x && y) return *x < *y || (*x == *y && a < b);
    if (x || y) return static_cast<bool>(x);
    return a < b;
}

std::set<std::string> placeholder_keys(const CriteriaSet& set) {
    std::set<std::string> keys;
    for (const auto& c : set.constraints()) keys.insert(c.value);
    return keys;
}

}  // namespace restarch

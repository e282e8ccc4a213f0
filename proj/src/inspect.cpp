#include "restarch/inspect.hpp"

#include <algorithm>

#include "restarch/error.hpp"
#include "restarch/search.hpp"
#include "restarch/vocabulary.hpp"

namespace restarch {

Inspector::Inspector(std::shared_ptr<const Session> session) : session_(std::move(session)) {}

std::vector<std::string> Inspector::datatypes() const {
    auto resp = session_->get(session_->endpoint(vocab::kSchemaElements) + "?format=csv").response;
    raise_for_status(resp, "listing datatypes");
    auto names = parse_csv(resp.body).column(vocab::kElementNameColumn);
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return names;
}

std::vector<std::string> Inspector::fields(std::string_view datatype) const {
    if (datatype.empty() || datatype.find('/') != std::string_view::npos) {
        throw UnknownDatatype("not a datatype name: '" + std::string(datatype) + "'");
    }
    auto uri = session_->endpoint(vocab::kSchemaElements) + "/" + percent_encode(datatype, ":") + "?format=csv";
    auto resp = session_->get(uri).response;
    if (resp.status == 404) throw UnknownDatatype("unknown datatype '" + std::string(datatype) + "'");
    raise_for_status(resp, "listing fields of " + std::string(datatype));
    std::vector<std::string> out;
    for (const auto& f : parse_csv(resp.body).column(vocab::kFieldIdColumn)) {
        out.push_back(std::string(datatype) + "/" + f);
    }
    return out;
}

std::vector<std::string> Inspector::field_values(std::string_view schema_field) const {
    auto slash = schema_field.find('/');
    if (slash == std::string_view::npos) {
        throw UnknownField("field must look like 'datatype/FIELD': '" + std::string(schema_field) + "'");
    }
    std::string datatype(schema_field.substr(0, slash));
    std::vector<std::string> known;
    try {
        known = fields(datatype);
    } catch (const UnknownDatatype&) {
        throw UnknownField("unknown field '" + std::string(schema_field) + "'");
    }
    if (std::find(known.begin(), known.end(), schema_field) == known.end()) {
        throw UnknownField("unknown field '" + std::string(schema_field) + "'");
    }

    std::string field(schema_field);
    CriteriaSet everything(Combinator::AND, {Constraint{field, CompareOp::LIKE, "%"}});
    auto table = SearchClient(session_).run(QuerySpec{datatype, {field}, everything});
    auto values = table.column(field);
    std::sort(values.begin(), values.end(),
              [](const std::string& a, const std::string& b) { return value_order_less(a, b); });
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

}  // namespace restarch

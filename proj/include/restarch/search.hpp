#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "restarch/criteria.hpp"
#include "restarch/session.hpp"
#include "restarch/table.hpp"

namespace restarch {

/// What a search returns: one row per `root_element` entity, one column per
/// schema field, filtered by `criteria`.
struct QuerySpec {
    std::string root_element;
    std::vector<std::string> columns;
    CriteriaSet criteria;

    /// Throws CriteriaError if a part is missing or malformed.
    void validate() const;

    bool operator==(const QuerySpec&) const = default;
};

/// Deterministic UTF-8 XML search document. Layout:
///
///   <search>
///     <root_element_name>ROW</root_element_name>
///     <search_field><element_name>DT</element_name><field_ID>F</field_ID>
///       <sequence>N</sequence></search_field>          (one per column)
///     <criteria_set method="AND|OR">
///       <criteria><schema_field/><comparison_type/><value/></criteria>
///       <child_set method="...">...</child_set>
///     </criteria_set>
///   </search>
///
/// Element names come from vocabulary.hpp.
std::string to_xml(const QuerySpec& spec);

/// Inverse of to_xml. Throws ParseError on malformed documents.
QuerySpec parse_query_xml(std::string_view xml);

struct SavedSearch {
    std::string name;
    QuerySpec spec;
    std::vector<std::string> shared_with;
};

/// A stored search whose constraint values are placeholder keys.
struct SearchTemplate {
    std::string name;
    QuerySpec spec;
    std::set<std::string> keys;
    std::vector<std::string> shared_with;

    /// Substitutes every key. Throws MissingBinding listing absent keys.
    QuerySpec bind(const std::map<std::string, std::string>& bindings) const;
};

/// Client for the search endpoint and the saved-search store.
class SearchClient {
public:
    explicit SearchClient(std::shared_ptr<const Session> session);

    /// POSTs the query document to `<base>/REST/search?format=...`.
    /// Throws SearchError on non-2xx, ParseError on a malformed payload.
    ResultTable run(const QuerySpec& spec, Format format = Format::csv) const;

    void save(const std::string& name, const QuerySpec& spec, const std::vector<std::string>& shared_with = {}) const;
    SavedSearch get(const std::string& name) const;

    void save_template(const std::string& name, const QuerySpec& spec,
                       const std::vector<std::string>& shared_with = {}) const;
    SearchTemplate get_template(const std::string& name) const;
    ResultTable use_template(const std::string& name, const std::map<std::string, std::string>& bindings,
                             Format format = Format::csv) const;

private:
    void put_document(std::string_view collection, const std::string& name, const QuerySpec& spec,
                      const std::vector<std::string>& shared_with) const;
    std::pair<QuerySpec, std::vector<std::string>> get_document(std::string_view collection,
                                                                const std::string& name) const;

    std::shared_ptr<const Session> session_;
};

std::vector<std::string> split_list(std::string_view s, char sep = ',');

}  // namespace restarch

#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "restarch/session.hpp"

namespace restarch {

/// Schema introspection: datatypes, their fields and the values a field
/// takes across the archive.
class Inspector {
public:
    explicit Inspector(std::shared_ptr<const Session> session);

    /// Sorted, duplicate-free datatype names.
    std::vector<std::string> datatypes() const;

    /// Fully qualified "datatype/FIELD" names. Throws UnknownDatatype.
    std::vector<std::string> fields(std::string_view datatype) const;

    /// Distinct values of a field, numbers first in numeric order, then
    /// text. Computed with a search over the field's datatype, not a
    /// dedicated endpoint. Throws UnknownField.
    std::vector<std::string> field_values(std::string_view schema_field) const;

private:
    std::shared_ptr<const Session> session_;
};

}  // namespace restarch

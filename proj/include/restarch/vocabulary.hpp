#pragma once

#include <array>
#include <string_view>

// Wire vocabulary shared by the client and the embedded mock archive. Change
// a spelling here to retarget a server with different conventions.
namespace restarch::vocab {

// Search query document.
inline constexpr std::string_view kSearch = "search";
inline constexpr std::string_view kRootElementName = "root_element_name";
inline constexpr std::string_view kSearchField = "search_field";
inline constexpr std::string_view kElementName = "element_name";
inline constexpr std::string_view kFieldId = "field_ID";
inline constexpr std::string_view kSequence = "sequence";
inline constexpr std::string_view kCriteriaSet = "criteria_set";
inline constexpr std::string_view kChildSet = "child_set";
inline constexpr std::string_view kMethod = "method";
inline constexpr std::string_view kCriteria = "criteria";
inline constexpr std::string_view kSchemaField = "schema_field";
inline constexpr std::string_view kComparisonType = "comparison_type";
inline constexpr std::string_view kValue = "value";

// Endpoints below `<base>/REST`.
inline constexpr std::string_view kSearchEndpoint = "/search";
inline constexpr std::string_view kSavedSearches = "/search/saved";
inline constexpr std::string_view kSearchTemplates = "/search/templates";
inline constexpr std::string_view kSchemaElements = "/search/elements";
inline constexpr std::string_view kAccessibility = "accessibility";
inline constexpr std::string_view kUsers = "users";

// Headers.
inline constexpr std::string_view kSharedWithHeader = "X-Shared-With";

// Listing and introspection columns.
inline constexpr std::string_view kIdColumn = "ID";
inline constexpr std::string_view kLabelColumn = "label";
inline constexpr std::string_view kXsiTypeColumn = "xsiType";
inline constexpr std::string_view kElementNameColumn = "ELEMENT_NAME";
inline constexpr std::string_view kFieldIdColumn = "FIELD_ID";
inline constexpr std::string_view kLoginColumn = "login";
inline constexpr std::string_view kRoleColumn = "role";

// Project administration.
inline constexpr std::array<std::string_view, 3> kAccessibilityLevels = {"public", "protected", "private"};
inline constexpr std::array<std::string_view, 3> kRoles = {"owner", "member", "collaborator"};

// Fields every datatype answers for, computed from the tree position.
inline constexpr std::string_view kFieldID = "ID";
inline constexpr std::string_view kFieldLabel = "LABEL";
inline constexpr std::string_view kFieldProject = "PROJECT";
inline constexpr std::string_view kFieldSubjectId = "SUBJECT_ID";

}  // namespace restarch::vocab

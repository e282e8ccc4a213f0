#pragma once

#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "restarch/uri_model.hpp"

namespace restarch::mock {

/// One node of the archive tree. Projects also carry accessibility and
/// members; files carry content and a modification time.
struct Entity {
    std::string level;
    std::string id;
    std::string label;
    std::string xsi_type;
    std::map<std::string, std::string> fields;
    std::vector<Entity> children;

    std::string content;
    std::string content_type = "application/octet-stream";
    std::time_t last_modified = 0;

    std::string accessibility = "private";
    std::map<std::string, std::string> members;  // login -> role
};

struct User {
    std::string login;
    std::string password;
    bool admin = false;
};

/// Declarative description of a mock archive. See docs/fixture-format.md.
struct Fixture {
    std::map<std::string, std::vector<std::string>> schema;  // datatype -> fields
    std::map<std::string, std::string> default_types;        // level -> datatype
    std::vector<User> users;
    std::vector<Entity> projects;

    static Fixture from_json(const nlohmann::json& doc);
    static Fixture load(const std::filesystem::path& file);
    nlohmann::json to_json() const;

    /// Throws ValidationError if the tree breaks the hierarchy, a metadata
    /// key is missing from the schema, or ids collide among siblings.
    void validate(const Hierarchy& h) const;

    const User* user(const std::string& login) const;
};

std::string format_http_time(std::time_t t);
std::optional<std::time_t> parse_http_time(const std::string& s);

}  // namespace restarch::mock

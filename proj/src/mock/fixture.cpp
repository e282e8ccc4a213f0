#include "restarch/mock/fixture.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "restarch/error.hpp"
#include "restarch/vocabulary.hpp"

namespace restarch::mock {

namespace {

const std::set<std::string> kScalarKeys = {"id",           "label",         "xsi_type", "fields",
                                           "content",      "content_type",  "last_modified",
                                           "accessibility", "members"};

Entity entity_from_json(const nlohmann::json& j, const std::string& level, const Fixture& f) {
    if (!j.is_object()) throw ValidationError("fixture " + level + " entry must be an object");
    Entity e;
    e.level = level;
    e.id = j.at("id").get<std::string>();
    e.label = j.value("label", e.id);
    if (auto it = f.default_types.find(level); it != f.default_types.end()) e.xsi_type = it->second;
    e.xsi_type = j.value("xsi_type", e.xsi_type);
    if (j.contains("fields")) {
        for (const auto& [k, v] : j.at("fields").items()) {
            e.fields[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
    }
    e.content = j.value("content", std::string());
    e.content_type = j.value("content_type", e.content_type);
    if (j.contains("last_modified")) {
        auto text = j.at("last_modified").get<std::string>();
        auto t = parse_http_time(text);
        if (!t) throw ValidationError("bad last_modified '" + text + "' on " + e.id);
        e.last_modified = *t;
    }
    e.accessibility = j.value("accessibility", e.accessibility);
    if (j.contains("members")) {
        for (const auto& [k, v] : j.at("members").items()) e.members[k] = v.get<std::string>();
    }
    for (const auto& [key, value] : j.items()) {
        if (kScalarKeys.count(key)) continue;
        if (!value.is_array()) throw ValidationError("unexpected key '" + key + "' on " + e.id);
        for (const auto& child : value) e.children.push_back(entity_from_json(child, key, f));
    }
    return e;
}

nlohmann::json entity_to_json(const Entity& e) {
    nlohmann::json j = {{"id", e.id}, {"label", e.label}, {"xsi_type", e.xsi_type}};
    if (!e.fields.empty()) j["fields"] = e.fields;
    if (e.level == "files") {
        j["content"] = e.content;
        j["content_type"] = e.content_type;
        j["last_modified"] = format_http_time(e.last_modified);
    }
    if (e.level == "projects") {
        j["accessibility"] = e.accessibility;
        j["members"] = e.members;
    }
    for (const auto& c : e.children) j[c.level].push_back(entity_to_json(c));
    return j;
}

bool builtin_field(const std::string& f) {
    return f == vocab::kFieldID || f == vocab::kFieldLabel || f == vocab::kFieldProject ||
           f == vocab::kFieldSubjectId;
}

void validate_entity(const Entity& e, const std::string& parent, const Fixture& f, const Hierarchy& h) {
    if (parent.empty() ? e.level != h.root() : !h.allows(parent, e.level)) {
        throw ValidationError("'" + e.level + "' cannot appear under '" + (parent.empty() ? "/" : parent) + "'");
    }
    if (e.id.empty() || e.id.find('/') != std::string::npos) throw ValidationError("bad id '" + e.id + "'");
    if (!e.fields.empty()) {
        auto it = f.schema.find(e.xsi_type);
        if (it == f.schema.end()) {
            throw ValidationError("entity " + e.id + " has metadata but type '" + e.xsi_type + "' is not in the schema");
        }
        for (const auto& [k, v] : e.fields) {
            if (!builtin_field(k) && std::find(it->second.begin(), it->second.end(), k) == it->second.end()) {
                throw ValidationError("field '" + k + "' of " + e.id + " is not in the schema of " + e.xsi_type);
            }
        }
    }
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& c : e.children) {
        if (!seen.insert({c.level, c.id}).second) throw ValidationError("duplicate " + c.level + " id '" + c.id + "'");
        validate_entity(c, e.level, f, h);
    }
}

}  // namespace

Fixture Fixture::from_json(const nlohmann::json& doc) {
    Fixture f;
    try {
        if (doc.contains("schema")) {
            for (const auto& [dt, fields] : doc.at("schema").items()) {
                f.schema[dt] = fields.get<std::vector<std::string>>();
            }
        }
        if (doc.contains("default_types")) {
            f.default_types = doc.at("default_types").get<std::map<std::string, std::string>>();
        }
        if (doc.contains("users")) {
            for (const auto& u : doc.at("users")) {
                f.users.push_back(User{u.at("login").get<std::string>(), u.value("password", std::string()),
                                       u.value("admin", false)});
            }
        }
        if (doc.contains("projects")) {
            for (const auto& p : doc.at("projects")) f.projects.push_back(entity_from_json(p, "projects", f));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed fixture: ") + e.what());
    }
    return f;
}

Fixture Fixture::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open fixture " + file.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("fixture " + file.string() + " is not JSON: " + e.what());
    }
    return from_json(doc);
}

nlohmann::json Fixture::to_json() const {
    nlohmann::json doc;
    doc["schema"] = schema;
    doc["default_types"] = default_types;
    doc["users"] = nlohmann::json::array();
    for (const auto& u : users) doc["users"].push_back({{"login", u.login}, {"password", u.password}, {"admin", u.admin}});
    doc["projects"] = nlohmann::json::array();
    for (const auto& p : projects) doc["projects"].push_back(entity_to_json(p));
    return doc;
}

void Fixture::validate(const Hierarchy& h) const {
    std::set<std::string> ids;
    for (const auto& p : projects) {
        if (!ids.insert(p.id).second) throw ValidationError("duplicate project id '" + p.id + "'");
        validate_entity(p, "", *this, h);
    }
}

const User* Fixture::user(const std::string& login) const {
    for (const auto& u : users) {
        if (u.login == login) return &u;
    }
    return nullptr;
}

std::string format_http_time(std::time_t t) {
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::strftime(buf, sizeof buf, "%a, %d %b %Y %H:%M:%S GMT", &tm);
    return buf;
}

std::optional<std::time_t> parse_http_time(const std::string& s) {
    std::tm tm{};
    const char* end = strptime(s.c_str(), "%a, %d %b %Y %H:%M:%S GMT", &tm);
    if (!end || *end != '\0') return std::nullopt;
    return timegm(&tm);
}

}  // namespace restarch::mock

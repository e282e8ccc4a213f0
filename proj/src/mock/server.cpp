#include "../httplib_config.hpp"

#include "restarch/mock/server.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <iostream>
#include <mutex>
#include <regex>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "restarch/error.hpp"
#include "restarch/vocabulary.hpp"

namespace restarch::mock {

namespace v = vocab;
namespace pt = boost::property_tree;

// Criteria evaluation

namespace {

bool is_decimal(const std::string& s) {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t digits = 0, dots = 0;
    for (; i < s.size(); ++i) {
        if (s[i] == '.') {
            if (++dots > 1) return false;
        } else if (s[i] >= '0' && s[i] <= '9') {
            ++digits;
        } else {
            return false;
        }
    }
    return digits > 0;
}

bool like(const std::string& text, const std::string& pattern) {
    std::string re;
    for (char c : pattern) {
        if (c == '%') {
            re += ".*";
        } else if (std::string_view("\\^$.|?*+()[]{}").find(c) != std::string_view::npos) {
            re += '\\';
            re += c;
        } else {
            re += c;
        }
    }
    return std::regex_match(text, std::regex(re));
}

}  // namespace

bool compare(const std::string& lhs, const std::string& op, const std::string& rhs) {
    if (op == "LIKE" || op == "like") return like(lhs, rhs);
    int order;
    if (is_decimal(lhs) && is_decimal(rhs)) {
        double a = std::strtod(lhs.c_str(), nullptr);
        double b = std::strtod(rhs.c_str(), nullptr);
        order = (a > b) - (a < b);
    } else {
        order = lhs == rhs ? 0 : (lhs < rhs ? -1 : 1);
    }
    if (op == "=") return order == 0;
    if (op == "!=") return order != 0;
    if (op == "<") return order < 0;
    if (op == ">") return order > 0;
    if (op == "<=") return order <= 0;
    if (op == ">=") return order >= 0;
    return false;
}

bool evaluate_criteria(const ConditionNode& node, const FieldLookup& lookup) {
    if (node.leaf) {
        auto value = lookup(node.leaf->schema_field);
        if (!value) return false;
        return compare(*value, node.leaf->comparison, node.leaf->value);
    }
    bool any = node.method == "OR";
    for (const auto& item : node.items) {
        bool r = evaluate_criteria(item, lookup);
        if (any && r) return true;
        if (!any && !r) return false;
    }
    return !any;
}

// Server

namespace {

using Chain = std::vector<const Entity*>;

struct Caller {
    std::string login;
    bool admin = false;
    bool guest = true;
};

struct Stored {
    std::string owner;
    std::string xml;
    std::vector<std::string> shared;
};

struct Reply {
    int status = 200;
    std::string body;
    std::string content_type = "text/plain";
    std::multimap<std::string, std::string> headers;
};

Reply status(int code, std::string msg = {}) {
    Reply r;
    r.status = code;
    r.body = std::move(msg);
    return r;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

std::string csv_field(const std::string& f, bool lone) {
    bool quote = (lone && f.empty()) || f.find_first_of(",\"\r\n") != std::string::npos;
    if (!quote) return f;
    std::string out = "\"";
    for (char c : f) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

Reply table_reply(const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows,
                  const std::string& format) {
    Reply r;
    if (format == "json") {
        nlohmann::json doc;
        doc["columns"] = columns;
        doc["result"] = nlohmann::json::array();
        for (const auto& row : rows) {
            nlohmann::json obj = nlohmann::json::object();
            for (std::size_t i = 0; i < columns.size(); ++i) obj[columns[i]] = row[i];
            doc["result"].push_back(std::move(obj));
        }
        r.body = doc.dump();
        r.content_type = "application/json";
        return r;
    }
    bool lone = columns.size() == 1;
    auto line = [&](const std::vector<std::string>& cells) {
        std::string out;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += csv_field(cells[i], lone);
        }
        return out + "\n";
    };
    r.body = line(columns);
    for (const auto& row : rows) r.body += line(row);
    r.content_type = "text/csv";
    return r;
}

std::optional<std::string> base64_decode(const std::string& in) {
    static const std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    unsigned buffer = 0;
    int bits = 0;
    for (char c : in) {
        if (c == '=') break;
        auto pos = alphabet.find(c);
        if (pos == std::string::npos) return std::nullopt;
        buffer = (buffer << 6) | static_cast<unsigned>(pos);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out += static_cast<char>((buffer >> bits) & 0xFF);
        }
    }
    return out;
}

bool builtin(const std::string& f) {
    return f == v::kFieldID || f == v::kFieldLabel || f == v::kFieldProject || f == v::kFieldSubjectId;
}

ConditionNode read_conditions(const pt::ptree& node) {
    ConditionNode set;
    set.method = node.get<std::string>(std::string("<xmlattr>.") + std::string(v::kMethod));
    if (set.method != "AND" && set.method != "OR") throw std::runtime_error("bad method " + set.method);
    for (const auto& [name, child] : node) {
        if (name == v::kCriteria) {
            ConditionNode leaf;
            leaf.leaf = Condition{child.get<std::string>(std::string(v::kSchemaField)),
                                  child.get<std::string>(std::string(v::kComparisonType)),
                                  child.get<std::string>(std::string(v::kValue), "")};
            set.items.push_back(std::move(leaf));
        } else if (name == v::kChildSet) {
            set.items.push_back(read_conditions(child));
        }
    }
    if (set.items.empty()) throw std::runtime_error("empty criteria set");
    return set;
}

struct SearchDoc {
    std::string root;
    std::vector<std::string> columns;
    ConditionNode criteria;
};

std::optional<SearchDoc> read_search(const std::string& xml) {
    try {
        pt::ptree tree;
        std::istringstream in(xml);
        pt::read_xml(in, tree);
        const auto& search = tree.get_child(std::string(v::kSearch));
        SearchDoc doc;
        doc.root = search.get<std::string>(std::string(v::kRootElementName));
        std::vector<std::pair<int, std::string>> fields;
        for (const auto& [name, child] : search) {
            if (name != v::kSearchField) continue;
            fields.emplace_back(child.get<int>(std::string(v::kSequence), static_cast<int>(fields.size())),
                                child.get<std::string>(std::string(v::kElementName)) + "/" +
                                    child.get<std::string>(std::string(v::kFieldId)));
        }
        std::stable_sort(fields.begin(), fields.end(), [](auto& a, auto& b) { return a.first < b.first; });
        for (auto& f : fields) doc.columns.push_back(f.second);
        doc.criteria = read_conditions(search.get_child(std::string(v::kCriteriaSet)));
        return doc;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

struct MockServer::State {
    std::shared_ptr<const Hierarchy> hierarchy;

    mutable std::shared_mutex mutex;
    Fixture fixture;
    std::map<std::string, Stored> saved;
    std::map<std::string, Stored> templates;

    mutable std::mutex log_mutex;
    std::vector<std::string> log;

    httplib::Server server;
    std::thread thread;

    // Request handling

    std::optional<Caller> authenticate(const httplib::Request& req) const {
        Caller c;
        if (!req.has_header("Authorization")) return c;
        auto header = req.get_header_value("Authorization");
        if (header.rfind("Basic ", 0) != 0) return std::nullopt;
        auto decoded = base64_decode(header.substr(6));
        if (!decoded) return std::nullopt;
        std::shared_lock lock(mutex);
        auto colon = decoded->find(':');
        if (colon == std::string::npos) return std::nullopt;
        const User* u = fixture.user(decoded->substr(0, colon));
        if (!u || u->password != decoded->substr(colon + 1)) return std::nullopt;
        c.login = u->login;
        c.admin = u->admin;
        c.guest = false;
        return c;
    }

    std::optional<std::string> level_name(const std::string& token) const {
        return hierarchy->canonical(token);
    }

    // Walks (level, id) pairs; ids match an entity's ID first, then its label.
    std::optional<std::vector<Entity*>> locate(const std::vector<std::pair<std::string, std::string>>& pairs) {
        std::vector<Entity*> chain;
        std::vector<Entity>* siblings = &fixture.projects;
        for (const auto& [level, id] : pairs) {
            Entity* found = nullptr;
            for (auto& e : *siblings) {
                if (e.level == level && e.id == id) {
                    found = &e;
                    break;
                }
            }
            if (!found) {
                for (auto& e : *siblings) {
                    if (e.level == level && e.label == id) {
                        found = &e;
                        break;
                    }
                }
            }
            if (!found) return std::nullopt;
            chain.push_back(found);
            siblings = &found->children;
        }
        return chain;
    }

    bool may_write(const Caller& c, const Entity& project, bool manage) const {
        if (c.admin) return true;
        auto it = project.members.find(c.login);
        if (it == project.members.end()) return false;
        return it->second == "owner" || (!manage && it->second == "member");
    }

    std::string column_value(const Entity& e, const std::string& column) const {
        if (column == v::kIdColumn) return e.id;
        if (column == v::kLabelColumn) return e.label;
        if (column == v::kXsiTypeColumn) return e.xsi_type;
        auto it = e.fields.find(column);
        return it == e.fields.end() ? std::string() : it->second;
    }

    Reply listing(const httplib::Request& req, const std::vector<Entity>& siblings, const std::string& level) {
        std::vector<std::string> columns = {std::string(v::kIdColumn)};
        if (req.has_param("columns")) {
            columns.clear();
            for (auto& c : split(req.get_param_value("columns"), ',')) {
                if (!c.empty() && std::find(columns.begin(), columns.end(), c) == columns.end()) columns.push_back(c);
            }
            if (columns.empty()) return status(400, "empty columns");
        }
        std::string type_filter = req.get_param_value("xsiType");
        std::vector<std::vector<std::string>> rows;
        for (const auto& e : siblings) {
            if (e.level != level) continue;
            if (!type_filter.empty() && e.xsi_type != type_filter) continue;
            std::vector<std::string> row;
            for (const auto& c : columns) row.push_back(column_value(e, c));
            rows.push_back(std::move(row));
        }
        return table_reply(columns, rows, req.get_param_value("format"));
    }

    Reply get_tree(const httplib::Request& req, const std::vector<std::pair<std::string, std::string>>& pairs,
                   const std::optional<std::string>& listing_level) {
        std::shared_lock lock(mutex);
        auto chain = locate(pairs);
        if (!chain) return status(404, "no such element");
        if (listing_level) {
            const auto& siblings = chain->empty() ? fixture.projects : chain->back()->children;
            return listing(req, siblings, *listing_level);
        }
        const Entity& e = *chain->back();
        if (e.level == "files") {
            Reply r;
            r.headers.emplace("Last-Modified", format_http_time(e.last_modified));
            if (req.has_header("If-Modified-Since")) {
                auto since = parse_http_time(req.get_header_value("If-Modified-Since"));
                if (since && e.last_modified <= *since) {
                    r.status = 304;
                    return r;
                }
            }
            r.body = e.content;
            r.content_type = e.content_type;
            return r;
        }
        nlohmann::json item = {{v::kIdColumn, e.id},
                               {v::kLabelColumn, e.label},
                               {v::kXsiTypeColumn, e.xsi_type},
                               {"fields", e.fields}};
        Reply r;
        r.body = nlohmann::json{{"item", item}}.dump();
        r.content_type = "application/json";
        return r;
    }

    Reply put_tree(const httplib::Request& req, const Caller& caller,
                   const std::vector<std::pair<std::string, std::string>>& pairs) {
        if (caller.guest) return status(401, "login required");
        std::unique_lock lock(mutex);
        auto parents = pairs;
        parents.pop_back();
        auto chain = locate(parents);
        if (!chain) return status(404, "parent does not exist");
        const auto& [level, id] = pairs.back();
        if (!chain->empty() && !may_write(caller, *chain->front(), false)) return status(403, "not a project member");

        auto self = locate(pairs);
        if (self) {
            Entity& e = *self->back();
            if (level == "projects" && !may_write(caller, e, false)) return status(403, "not a project member");
            if (req.has_param("label")) e.label = req.get_param_value("label");
            if (req.has_param("xsiType")) e.xsi_type = req.get_param_value("xsiType");
            if (e.level == "files") {
                e.content = req.body;
                e.last_modified = std::time(nullptr);
                if (req.has_header("Content-Type")) e.content_type = req.get_header_value("Content-Type");
            }
            return status(200);
        }

        Entity e;
        e.level = level;
        e.id = id;
        e.label = req.has_param("label") ? req.get_param_value("label") : id;
        if (auto it = fixture.default_types.find(level); it != fixture.default_types.end()) e.xsi_type = it->second;
        if (req.has_param("xsiType")) e.xsi_type = req.get_param_value("xsiType");
        if (level == "files") {
            e.content = req.body;
            e.last_modified = std::time(nullptr);
            if (req.has_header("Content-Type")) e.content_type = req.get_header_value("Content-Type");
        }
        if (level == "projects") e.members[caller.login] = "owner";
        auto& siblings = chain->empty() ? fixture.projects : chain->back()->children;
        siblings.push_back(std::move(e));
        return status(201);
    }

    Reply delete_tree(const Caller& caller, const std::vector<std::pair<std::string, std::string>>& pairs) {
        if (caller.guest) return status(401, "login required");
        std::unique_lock lock(mutex);
        auto chain = locate(pairs);
        if (!chain) return status(404, "no such element");
        if (!may_write(caller, *chain->front(), chain->size() == 1)) return status(403, "not allowed");
        Entity* target = chain->back();
        auto& siblings = chain->size() == 1 ? fixture.projects : (*chain)[chain->size() - 2]->children;
        siblings.erase(std::remove_if(siblings.begin(), siblings.end(), [&](const Entity& e) { return &e == target; }),
                       siblings.end());
        return status(200);
    }

    // Search

    std::set<std::string> known_datatypes() const {
        std::set<std::string> out;
        for (const auto& [dt, fields] : fixture.schema) out.insert(dt);
        std::function<void(const Entity&)> walk = [&](const Entity& e) {
            if (!e.xsi_type.empty()) out.insert(e.xsi_type);
            for (const auto& c : e.children) walk(c);
        };
        for (const auto& p : fixture.projects) walk(p);
        return out;
    }

    bool known_field(const std::string& dt, const std::string& field) const {
        if (builtin(field)) return true;
        auto it = fixture.schema.find(dt);
        return it != fixture.schema.end() && std::find(it->second.begin(), it->second.end(), field) != it->second.end();
    }

    static bool find_descendant(const Entity& e, const std::string& dt, Chain& chain) {
        for (const auto& c : e.children) {
            chain.push_back(&c);
            if (c.xsi_type == dt || find_descendant(c, dt, chain)) return true;
            chain.pop_back();
        }
        return false;
    }

    // The entity a datatype refers to from a row: the row itself, the
    // nearest ancestor of that type, or else the first descendant.
    static std::optional<Chain> join(const Chain& row, const std::string& dt) {
        for (std::size_t n = row.size(); n > 0; --n) {
            if (row[n - 1]->xsi_type == dt) return Chain(row.begin(), row.begin() + static_cast<long>(n));
        }
        Chain chain = row;
        if (find_descendant(*row.back(), dt, chain)) return chain;
        return std::nullopt;
    }

    static std::optional<std::string> field_of(const Chain& chain, const std::string& field) {
        const Entity& e = *chain.back();
        if (field == v::kFieldID) return e.id;
        if (field == v::kFieldLabel) return e.label;
        if (field == v::kFieldProject) return chain.front()->id;
        if (field == v::kFieldSubjectId) {
            for (const auto* a : chain) {
                if (a->level == "subjects") return a->id;
            }
            return std::nullopt;
        }
        auto it = e.fields.find(field);
        if (it == e.fields.end()) return std::nullopt;
        return it->second;
    }

    static std::optional<std::string> lookup(const Chain& row, const std::string& schema_field) {
        auto slash = schema_field.find('/');
        if (slash == std::string::npos) return std::nullopt;
        auto chain = join(row, schema_field.substr(0, slash));
        if (!chain) return std::nullopt;
        return field_of(*chain, schema_field.substr(slash + 1));
    }

    Reply run_search(const httplib::Request& req) {
        auto doc = read_search(req.body);
        if (!doc) return status(400, "malformed search document");
        std::shared_lock lock(mutex);
        auto types = known_datatypes();
        if (!types.count(doc->root)) return status(400, "unknown root element " + doc->root);
        for (const auto& c : doc->columns) {
            auto slash = c.find('/');
            auto dt = c.substr(0, slash);
            if (!types.count(dt) || !known_field(dt, c.substr(slash + 1))) return status(400, "unknown column " + c);
        }
        std::vector<std::vector<std::string>> rows;
        Chain chain;
        std::function<void(const Entity&)> walk = [&](const Entity& e) {
            chain.push_back(&e);
            if (e.xsi_type == doc->root) {
                auto look = [&](const std::string& f) { return lookup(chain, f); };
                if (evaluate_criteria(doc->criteria, look)) {
                    std::vector<std::string> row;
                    for (const auto& c : doc->columns) row.push_back(look(c).value_or(""));
                    rows.push_back(std::move(row));
                }
            }
            for (const auto& c : e.children) walk(c);
            chain.pop_back();
        };
        for (const auto& p : fixture.projects) walk(p);
        return table_reply(doc->columns, rows, req.get_param_value("format"));
    }

    Reply schema_elements(const httplib::Request& req, const std::vector<std::string>& rest) {
        std::shared_lock lock(mutex);
        auto format = req.get_param_value("format");
        if (rest.empty()) {
            std::vector<std::vector<std::string>> rows;
            for (const auto& [dt, fields] : fixture.schema) rows.push_back({dt});
            return table_reply({std::string(v::kElementNameColumn)}, rows, format);
        }
        auto it = fixture.schema.find(rest[0]);
        if (rest.size() != 1 || it == fixture.schema.end()) return status(404, "unknown datatype");
        std::vector<std::vector<std::string>> rows;
        for (auto b : {v::kFieldID, v::kFieldLabel, v::kFieldProject, v::kFieldSubjectId}) rows.push_back({std::string(b)});
        for (const auto& f : it->second) {
            if (!builtin(f)) rows.push_back({f});
        }
        return table_reply({std::string(v::kFieldIdColumn)}, rows, format);
    }

    Reply stored_document(const httplib::Request& req, const Caller& caller, std::map<std::string, Stored>& store,
                          const std::string& name) {
        if (req.method == "PUT") {
            if (caller.guest) return status(401, "login required");
            if (!read_search(req.body)) return status(400, "malformed search document");
            std::unique_lock lock(mutex);
            auto it = store.find(name);
            if (it != store.end() && it->second.owner != caller.login && !caller.admin) {
                return status(403, "owned by another user");
            }
            Stored s{it == store.end() ? caller.login : it->second.owner, req.body, {}};
            for (auto& u : split(req.get_header_value(std::string(v::kSharedWithHeader)), ',')) {
                if (!u.empty()) s.shared.push_back(u);
            }
            bool created = it == store.end();
            store[name] = std::move(s);
            return status(created ? 201 : 200);
        }
        if (req.method != "GET") return status(400, "unsupported method");
        std::shared_lock lock(mutex);
        auto it = store.find(name);
        if (it == store.end()) return status(404, "no such search");
        const auto& s = it->second;
        bool visible = caller.admin || (!caller.guest && (s.owner == caller.login ||
                                                          std::find(s.shared.begin(), s.shared.end(), caller.login) !=
                                                              s.shared.end()));
        if (!visible) return status(404, "no such search");
        Reply r;
        r.body = s.xml;
        r.content_type = "application/xml";
        std::string joined;
        for (const auto& u : s.shared) joined += (joined.empty() ? "" : ",") + u;
        if (!joined.empty()) r.headers.emplace(std::string(v::kSharedWithHeader), joined);
        return r;
    }

    // Project administration

    Reply manage(const httplib::Request& req, const Caller& caller, const std::string& project,
                 const std::vector<std::string>& rest) {
        bool write = req.method != "GET";
        if (write && caller.guest) return status(401, "login required");
        std::unique_lock lock(mutex);
        auto chain = locate({{"projects", project}});
        if (!chain) return status(404, "no such project");
        Entity& p = *chain->front();
        if (write && !may_write(caller, p, true)) return status(403, "project owner required");

        if (rest[0] == v::kAccessibility) {
            if (rest.size() == 1 && req.method == "GET") return Reply{200, p.accessibility + "\n", "text/plain", {}};
            if (rest.size() == 2 && req.method == "PUT") {
                const auto& levels = v::kAccessibilityLevels;
                if (std::find(levels.begin(), levels.end(), rest[1]) == levels.end()) {
                    return status(400, "unknown accessibility");
                }
                p.accessibility = rest[1];
                return status(200);
            }
            return status(400, "bad accessibility request");
        }
        if (rest.size() == 1 && req.method == "GET") {
            std::vector<std::vector<std::string>> rows;
            for (const auto& [login, role] : p.members) rows.push_back({login, role});
            return table_reply({std::string(v::kLoginColumn), std::string(v::kRoleColumn)}, rows,
                               req.get_param_value("format"));
        }
        if (rest.size() != 3) return status(400, "bad users request");
        const auto& role = rest[1];
        const auto& login = rest[2];
        if (std::find(v::kRoles.begin(), v::kRoles.end(), role) == v::kRoles.end()) return status(400, "unknown role");
        if (req.method == "PUT") {
            if (!fixture.user(login)) return status(404, "unknown user");
            bool created = !p.members.count(login);
            p.members[login] = role;
            return status(created ? 201 : 200);
        }
        if (req.method == "DELETE") {
            auto it = p.members.find(login);
            if (it == p.members.end() || it->second != role) return status(404, "not a member with that role");
            p.members.erase(it);
            return status(200);
        }
        return status(400, "unsupported method");
    }

    // Dispatch

    Reply dispatch(const httplib::Request& req) {
        auto caller = authenticate(req);
        if (!caller) return status(401, "bad credentials");

        const std::string prefix = "/REST";
        if (req.path.rfind(prefix, 0) != 0) return status(404, "not an archive path");
        std::string tail = req.path.substr(prefix.size());
        if (!tail.empty() && tail.back() == '/') tail.pop_back();
        std::vector<std::string> tokens;
        for (auto& t : split(tail, '/')) {
            if (!t.empty()) tokens.push_back(t);
        }

        if (tokens.empty()) {
            if (req.method != "GET") return status(400, "unsupported method");
            return table_reply({std::string(v::kIdColumn)}, {{hierarchy->root()}}, req.get_param_value("format"));
        }

        if (tokens[0] == "search") {
            if (tokens.size() == 1) {
                if (req.method != "POST") return status(400, "search takes POST");
                return run_search(req);
            }
            std::vector<std::string> rest(tokens.begin() + 2, tokens.end());
            if (tokens[1] == "elements" && req.method == "GET") return schema_elements(req, rest);
            if (rest.size() == 1 && tokens[1] == "saved") return stored_document(req, *caller, saved, rest[0]);
            if (rest.size() == 1 && tokens[1] == "templates") return stored_document(req, *caller, templates, rest[0]);
            return status(404, "unknown search resource");
        }

        if (tokens.size() >= 3 && level_name(tokens[0]) == hierarchy->root() &&
            (tokens[2] == v::kAccessibility || tokens[2] == v::kUsers)) {
            return manage(req, *caller, tokens[1], std::vector<std::string>(tokens.begin() + 2, tokens.end()));
        }

        std::vector<std::pair<std::string, std::string>> pairs;
        std::optional<std::string> listing_level;
        std::string parent;
        for (std::size_t i = 0; i < tokens.size(); i += 2) {
            auto level = level_name(tokens[i]);
            if (!level) return status(404, "unknown level " + tokens[i]);
            bool allowed = parent.empty() ? *level == hierarchy->root() : hierarchy->allows(parent, *level);
            if (!allowed) return status(404, *level + " cannot follow " + (parent.empty() ? "/" : parent));
            if (i + 1 < tokens.size()) {
                pairs.emplace_back(*level, tokens[i + 1]);
            } else {
                listing_level = *level;
            }
            parent = *level;
        }

        if (listing_level) {
            if (req.method != "GET") return status(400, "collections only support GET");
            return get_tree(req, pairs, listing_level);
        }
        if (req.method == "GET") return get_tree(req, pairs, std::nullopt);
        if (req.method == "PUT") return put_tree(req, *caller, pairs);
        if (req.method == "DELETE") return delete_tree(*caller, pairs);
        return status(400, "unsupported method");
    }

    void handle(const httplib::Request& req, httplib::Response& res) {
        {
            std::lock_guard lock(log_mutex);
            log.push_back(req.method + " " + req.target);
        }
        Reply r;
        try {
            r = dispatch(req);
        } catch (const std::exception& e) {
            r = status(400, e.what());
        }
        res.status = r.status;
        for (const auto& [k, val] : r.headers) res.set_header(k, val);
        if (r.status != 304) res.set_content(r.body, r.content_type);
    }
};

MockServer::MockServer(Fixture fixture, int port, std::shared_ptr<const Hierarchy> h)
    : state_(std::make_unique<State>()) {
    fixture.validate(*h);
    state_->hierarchy = std::move(h);
    state_->fixture = std::move(fixture);
    state_->server.new_task_queue = [] { return new httplib::ThreadPool(8); };
    // Without SO_REUSEPORT a second server on a taken port fails to bind.
    state_->server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });

    auto handler = [s = state_.get()](const httplib::Request& req, httplib::Response& res) { s->handle(req, res); };
    state_->server.Get(".*", handler);
    state_->server.Put(".*", handler);
    state_->server.Post(".*", handler);
    state_->server.Delete(".*", handler);

    if (port == 0) {
        port_ = state_->server.bind_to_any_port("127.0.0.1");
        if (port_ <= 0) throw PortUnavailable("cannot bind an ephemeral port on 127.0.0.1");
    } else {
        if (!state_->server.bind_to_port("127.0.0.1", port)) {
            throw PortUnavailable("port " + std::to_string(port) + " is unavailable");
        }
        port_ = port;
    }
    state_->thread = std::thread([s = state_.get()] { s->server.listen_after_bind(); });
    state_->server.wait_until_ready();
}

MockServer::~MockServer() {
    state_->server.stop();
    if (state_->thread.joinable()) state_->thread.join();
}

std::string MockServer::url() const { return "http://127.0.0.1:" + std::to_string(port_); }

void MockServer::reset(Fixture fixture) {
    fixture.validate(*state_->hierarchy);
    std::unique_lock lock(state_->mutex);
    state_->fixture = std::move(fixture);
    state_->saved.clear();
    state_->templates.clear();
}

Fixture MockServer::snapshot() const {
    std::shared_lock lock(state_->mutex);
    return state_->fixture;
}

void MockServer::touch(const std::string& path, std::time_t last_modified, std::optional<std::string> content) {
    std::vector<std::string> tokens;
    for (auto& t : split(path, '/')) {
        if (!t.empty()) tokens.push_back(t);
    }
    if (tokens.size() % 2 != 0) throw ValidationError("touch needs an element path: " + path);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t i = 0; i < tokens.size(); i += 2) {
        auto level = state_->hierarchy->canonical(tokens[i]);
        if (!level) throw ValidationError("unknown level in " + path);
        pairs.emplace_back(*level, tokens[i + 1]);
    }
    std::unique_lock lock(state_->mutex);
    auto chain = state_->locate(pairs);
    if (!chain) throw ValidationError("no such element: " + path);
    chain->back()->last_modified = last_modified;
    if (content) chain->back()->content = std::move(*content);
}

std::vector<std::string> MockServer::request_log() const {
    std::lock_guard lock(state_->log_mutex);
    return state_->log;
}

void MockServer::clear_log() {
    std::lock_guard lock(state_->log_mutex);
    state_->log.clear();
}

}  // namespace restarch::mock

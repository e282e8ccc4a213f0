#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "restarch/interface.hpp"
#include "restarch/mock/server.hpp"

namespace testing {

using namespace restarch;

inline std::filesystem::path source_dir() { return RESTARCH_SOURCE_DIR; }
inline std::filesystem::path default_fixture_path() { return source_dir() / "fixtures" / "default.json"; }
inline mock::Fixture default_fixture() { return mock::Fixture::load(default_fixture_path()); }

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "restarch-test-XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Mock server plus a client stack wired to it: HTTP transport, optional
/// cache on a manual clock, session and interface.
struct Harness {
    explicit Harness(mock::Fixture fixture = default_fixture(), bool cached = true,
                     Credentials creds = {"admin", "admin"})
        : server(std::move(fixture)) {
        HttpOptions opts;
        opts.credentials = std::move(creds);
        transport = std::make_shared<HttpTransport>(opts);
        clock = std::make_shared<ManualClock>();
        if (cached) cache = std::make_shared<Cache>(dir.path() / "cache", transport, clock);
        session = std::make_shared<Session>(server.url(), transport, cache);
        iface = std::make_unique<Interface>(session);
    }

    /// Listing GETs seen by the transport so far.
    std::size_t listing_calls() const {
        std::size_t n = 0;
        for (const auto& line : transport->call_log()) {
            if (line.rfind("GET ", 0) == 0 && classify_uri(line.substr(4), transport->hierarchy()) == UriClass::collection) {
                ++n;
            }
        }
        return n;
    }

    TempDir dir;
    mock::MockServer server;
    std::shared_ptr<HttpTransport> transport;
    std::shared_ptr<ManualClock> clock;
    std::shared_ptr<Cache> cache;
    std::shared_ptr<Session> session;
    std::unique_ptr<Interface> iface;
};

// Independent oracles over fixture data. None of these call into the
// client library's matching or evaluation code.

/// `*` glob via std::regex.
inline bool oracle_glob(const std::string& pattern, const std::string& text) {
    std::string re;
    for (char c : pattern) {
        if (c == '*') {
            re += ".*";
        } else if (std::isalnum(static_cast<unsigned char>(c))) {
            re += c;
        } else {
            re += '\\';
            re += c;
        }
    }
    return std::regex_match(text, std::regex(re));
}

struct WalkedEntity {
    std::vector<const mock::Entity*> chain;
    std::string path;  // /level/id/... with ids
};

/// Every entity reached by a (level, pattern) walk of the fixture; a
/// pattern matches ids or labels.
inline std::vector<WalkedEntity> oracle_walk(const mock::Fixture& f,
                                             const std::vector<std::pair<std::string, std::string>>& pattern) {
    std::vector<WalkedEntity> out;
    std::function<void(const std::vector<mock::Entity>&, std::size_t, WalkedEntity)> rec =
        [&](const std::vector<mock::Entity>& siblings, std::size_t depth, WalkedEntity acc) {
            const auto& [level, pat] = pattern[depth];
            for (const auto& e : siblings) {
                if (e.level != level) continue;
                if (!oracle_glob(pat, e.id) && !oracle_glob(pat, e.label)) continue;
                WalkedEntity next = acc;
                next.chain.push_back(&e);
                next.path += "/" + e.level + "/" + e.id;
                if (depth + 1 == pattern.size()) {
                    out.push_back(next);
                } else {
                    rec(e.children, depth + 1, next);
                }
            }
        };
    if (!pattern.empty()) rec(f.projects, 0, {});
    return out;
}

inline std::optional<double> oracle_number(const std::string& s) {
    static const std::regex re(R"([+-]?(\d+\.?\d*|\.\d+))");
    if (!std::regex_match(s, re)) return std::nullopt;
    return std::stod(s);
}

inline bool oracle_like(const std::string& text, const std::string& pattern) {
    // Recursive matcher; `%` is any run.
    std::function<bool(std::size_t, std::size_t)> m = [&](std::size_t t, std::size_t p) -> bool {
        if (p == pattern.size()) return t == text.size();
        if (pattern[p] == '%') {
            for (std::size_t k = t; k <= text.size(); ++k) {
                if (m(k, p + 1)) return true;
            }
            return false;
        }
        return t < text.size() && text[t] == pattern[p] && m(t + 1, p + 1);
    };
    return m(0, 0);
}

inline bool oracle_compare(const std::string& lhs, CompareOp op, const std::string& rhs) {
    if (op == CompareOp::LIKE) return oracle_like(lhs, rhs);
    auto a = oracle_number(lhs);
    auto b = oracle_number(rhs);
    bool less, greater;
    if (a && b) {
        less = *a < *b;
        greater = *a > *b;
    } else {
        less = lhs < rhs;
        greater = rhs < lhs;
    }
    switch (op) {
        case CompareOp::EQ: return !less && !greater;
        case CompareOp::NEQ: return less || greater;
        case CompareOp::LT: return less;
        case CompareOp::GT: return greater;
        case CompareOp::LE: return !greater;
        case CompareOp::GE: return !less;
        case CompareOp::LIKE: break;
    }
    return false;
}

/// Truth value of a criteria tree given a field -> value map; absent
/// fields make a constraint false.
inline bool oracle_eval(const CriteriaSet& set, const std::map<std::string, std::string>& values) {
    std::vector<bool> results;
    for (const auto& item : set.items) {
        if (const auto* c = std::get_if<Constraint>(&item.node)) {
            auto it = values.find(c->schema_field);
            results.push_back(it != values.end() && oracle_compare(it->second, c->op, c->value));
        } else {
            results.push_back(oracle_eval(std::get<CriteriaSet>(item.node), values));
        }
    }
    if (set.method == Combinator::AND) return std::all_of(results.begin(), results.end(), [](bool b) { return b; });
    return std::any_of(results.begin(), results.end(), [](bool b) { return b; });
}

/// Random archive: projects > subjects > MR sessions with metadata drawn
/// from small pools so random criteria hit often.
inline mock::Fixture random_fixture(std::mt19937& rng, std::size_t max_entities = 200) {
    auto base = default_fixture();
    mock::Fixture f;
    f.schema = base.schema;
    f.default_types = base.default_types;
    f.users = base.users;
    std::uniform_int_distribution<int> n_projects(1, 3), n_subjects(0, 6), n_sessions(0, 3), age(10, 95);
    const std::vector<std::string> genders = {"male", "female"}, hands = {"left", "right", "ambidextrous"};
    auto pick = [&](const std::vector<std::string>& v) {
        return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
    };
    std::size_t count = 0;
    int projects = n_projects(rng);
    for (int p = 0; p < projects && count < max_entities; ++p) {
        mock::Entity proj;
        proj.level = "projects";
        proj.id = "P" + std::to_string(p);
        proj.label = proj.id;
        proj.xsi_type = "xnat:projectData";
        ++count;
        int subjects = n_subjects(rng);
        for (int s = 0; s < subjects && count < max_entities; ++s) {
            mock::Entity subj;
            subj.level = "subjects";
            subj.id = proj.id + "_S" + std::to_string(s);
            subj.label = "sub" + std::to_string(s);
            subj.xsi_type = "xnat:subjectData";
            subj.fields["GENDER"] = pick(genders);
            if (rng() % 4 != 0) subj.fields["HANDEDNESS"] = pick(hands);  // sometimes missing
            ++count;
            int sessions = n_sessions(rng);
            for (int e = 0; e < sessions && count < max_entities; ++e) {
                mock::Entity exp;
                exp.level = "experiments";
                exp.id = subj.id + "_E" + std::to_string(e);
                exp.label = subj.label + "_MR" + std::to_string(e + 1);
                exp.xsi_type = "xnat:mrSessionData";
                exp.fields["AGE"] = std::to_string(age(rng));
                ++count;
                subj.children.push_back(std::move(exp));
            }
            proj.children.push_back(std::move(subj));
        }
        f.projects.push_back(std::move(proj));
    }
    return f;
}

/// Random criteria tree over session and subject fields, up to the given
/// depth and width.
inline CriteriaSet random_criteria(std::mt19937& rng, int depth = 4, int width = 4) {
    static const std::vector<std::string> fields = {"xnat:mrSessionData/AGE", "xnat:mrSessionData/LABEL",
                                                    "xnat:mrSessionData/PROJECT", "xnat:subjectData/GENDER",
                                                    "xnat:subjectData/HANDEDNESS"};
    static const std::vector<CompareOp> ops = {CompareOp::EQ, CompareOp::NEQ, CompareOp::LT, CompareOp::GT,
                                               CompareOp::LE, CompareOp::GE, CompareOp::LIKE};
    auto value_for = [&](const std::string& field, CompareOp op) -> std::string {
        if (op == CompareOp::LIKE) {
            static const std::vector<std::string> pats = {"%", "m%", "%ale", "%a%", "P1%", "%MR1", "4%", "%5"};
            return pats[rng() % pats.size()];
        }
        if (field.ends_with("AGE")) return std::to_string(10 + rng() % 86);
        if (field.ends_with("GENDER")) return rng() % 2 ? "male" : "female";
        if (field.ends_with("HANDEDNESS")) return rng() % 2 ? "left" : "right";
        if (field.ends_with("PROJECT")) return "P" + std::to_string(rng() % 4);
        return "sub" + std::to_string(rng() % 6) + "_MR" + std::to_string(1 + rng() % 3);
    };
    std::function<CriteriaSet(int)> build = [&](int level) {
        CriteriaSet set;
        set.method = rng() % 2 ? Combinator::AND : Combinator::OR;
        int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(width));
        for (int i = 0; i < n; ++i) {
            if (level > 1 && rng() % 3 == 0) {
                set.items.emplace_back(build(level - 1));
            } else {
                const auto& field = fields[rng() % fields.size()];
                auto op = ops[rng() % ops.size()];
                set.items.emplace_back(Constraint{field, op, value_for(field, op)});
            }
        }
        return set;
    };
    return build(depth);
}

/// Session ids an independent evaluation of the tree selects.
inline std::set<std::string> oracle_sessions(const mock::Fixture& f, const CriteriaSet& criteria) {
    std::set<std::string> out;
    for (const auto& p : f.projects) {
        for (const auto& s : p.children) {
            for (const auto& e : s.children) {
                if (e.xsi_type != "xnat:mrSessionData") continue;
                std::map<std::string, std::string> values = {
                    {"xnat:mrSessionData/LABEL", e.label},
                    {"xnat:mrSessionData/PROJECT", p.id},
                    {"xnat:mrSessionData/ID", e.id},
                };
                if (auto it = e.fields.find("AGE"); it != e.fields.end()) values["xnat:mrSessionData/AGE"] = it->second;
                for (const auto& [k, val] : s.fields) values["xnat:subjectData/" + k] = val;
                if (oracle_eval(criteria, values)) out.insert(e.id);
            }
        }
    }
    return out;
}

}  // namespace testing

#include "restarch/uri_model.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <functional>
#include <regex>

#include "restarch/error.hpp"

namespace restarch {

namespace {

const nlohmann::json& default_config() {
    static const nlohmann::json config = {
        {"root", "projects"},
        {"levels",
         {
             {"projects", {"subjects", "resources"}},
             {"subjects", {"experiments", "resources"}},
             {"experiments", {"scans", "assessors", "reconstructions", "resources"}},
             {"scans", {"resources"}},
             {"assessors", {"resources"}},
             {"reconstructions", {"resources"}},
             {"resources", {"files"}},
             {"files", nlohmann::json::array()},
         }},
    };
    return config;
}

}  // namespace

std::shared_ptr<const Hierarchy> Hierarchy::xnat() {
    static const auto instance = from_json(default_config());
    return instance;
}

std::shared_ptr<const Hierarchy> Hierarchy::from_json(const nlohmann::json& config) {
    std::shared_ptr<Hierarchy> h(new Hierarchy());
    try {
        h->root_ = config.at("root").get<std::string>();
        for (const auto& [name, kids] : config.at("levels").items()) {
            h->children_[name] = kids.get<std::vector<std::string>>();
        }
        for (const auto& [name, kids] : h->children_) {
            if (name.size() > 1 && name.back() == 's') {
                h->aliases_[name.substr(0, name.size() - 1)] = name;
            }
        }
        if (config.contains("aliases")) {
            for (const auto& [alias, target] : config.at("aliases").items()) {
                h->aliases_[alias] = target.get<std::string>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("bad hierarchy config: ") + e.what());
    }
    h->check();
    return h;
}

std::shared_ptr<const Hierarchy> Hierarchy::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open hierarchy config " + path);
    nlohmann::json config;
    try {
        in >> config;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("bad hierarchy config " + path + ": " + e.what());
    }
    return from_json(config);
}

void Hierarchy::check() const {
    if (!has_level(root_)) throw ValidationError("hierarchy root '" + root_ + "' is not a level");
    for (const auto& [name, kids] : children_) {
        for (const auto& k : kids) {
            if (!has_level(k)) {
                throw ValidationError("level '" + name + "' lists undeclared child '" + k + "'");
            }
        }
    }
    for (const auto& [alias, target] : aliases_) {
        if (!has_level(target)) {
            throw ValidationError("alias '" + alias + "' targets undeclared level '" + target + "'");
        }
    }
    // Cycle check: DFS with colors.
    std::map<std::string, int, std::less<>> color;
    std::function<void(const std::string&)> visit = [&](const std::string& n) {
        color[n] = 1;
        for (const auto& k : children(n)) {
            if (color[k] == 1) throw ValidationError("hierarchy has a cycle through '" + k + "'");
            if (color[k] == 0) visit(k);
        }
        color[n] = 2;
    };
    for (const auto& [name, kids] : children_) {
        if (color[name] == 0) visit(name);
    }
}

bool Hierarchy::has_level(std::string_view name) const {
    return children_.find(name) != children_.end();
}

const std::vector<std::string>& Hierarchy::children(std::string_view level) const {
    static const std::vector<std::string> none;
    auto it = children_.find(level);
    return it == children_.end() ? none : it->second;
}

bool Hierarchy::allows(std::string_view parent, std::string_view child) const {
    const auto& kids = children(parent);
    return std::find(kids.begin(), kids.end(), child) != kids.end();
}

bool Hierarchy::is_terminal(std::string_view level) const { return children(level).empty(); }

std::optional<std::string> Hierarchy::canonical(std::string_view keyword) const {
    if (has_level(keyword)) return std::string(keyword);
    auto it = aliases_.find(keyword);
    if (it != aliases_.end()) return it->second;
    return std::nullopt;
}

std::vector<std::vector<std::string>> Hierarchy::shortest_chains(std::string_view from,
                                                                 std::string_view to) const {
    auto next = [&](const std::string& n) -> std::vector<std::string> {
        if (n.empty()) return {root_};
        return children(n);
    };
    // BFS for distances, then enumerate every path that follows them.
    std::map<std::string, int> dist;
    std::deque<std::string> queue{std::string(from)};
    dist[std::string(from)] = 0;
    while (!queue.empty()) {
        auto n = queue.front();
        queue.pop_front();
        for (const auto& k : next(n)) {
            if (!dist.count(k)) {
                dist[k] = dist[n] + 1;
                queue.push_back(k);
            }
        }
    }
    std::vector<std::vector<std::string>> out;
    auto target = dist.find(std::string(to));
    if (target == dist.end() || target->second == 0) return out;
    std::vector<std::string> chain;
    std::function<void(const std::string&)> walk = [&](const std::string& n) {
        if (n == to) {
            out.push_back(chain);
            return;
        }
        for (const auto& k : next(n)) {
            auto d = dist.find(k);
            if (d != dist.end() && d->second == dist[n] + 1 && d->second <= target->second) {
                chain.push_back(k);
                walk(k);
                chain.pop_back();
            }
        }
    };
    walk(std::string(from));
    return out;
}

std::vector<std::string> Hierarchy::levels() const {
    std::vector<std::string> out;
    for (const auto& [name, kids] : children_) out.push_back(name);
    return out;
}

bool has_glob(std::string_view pattern) { return pattern.find('*') != std::string_view::npos; }

bool glob_match(std::string_view pattern, std::string_view text) {
    // Iterative matcher with single-star backtracking.
    std::size_t p = 0, t = 0;
    std::size_t star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && pattern[p] == '*') {
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
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

PathKind ResourcePath::kind() const noexcept {
    if (segments_.empty()) return PathKind::collection;
    const auto& last = segments_.back();
    if (last.pattern && !has_glob(*last.pattern)) return PathKind::element;
    return PathKind::collection;
}

bool ResourcePath::is_concrete() const noexcept {
    if (segments_.empty() || !segments_.back().pattern) return false;
    return std::none_of(segments_.begin(), segments_.end(),
                        [](const Segment& s) { return s.pattern && has_glob(*s.pattern); });
}

std::string ResourcePath::str() const {
    std::string out;
    for (const auto& s : segments_) {
        out += '/';
        out += s.level;
        if (s.pattern) {
            out += '/';
            out += *s.pattern;
        }
    }
    return out;
}

ResourcePath ResourcePath::prefix(std::size_t n) const {
    ResourcePath p;
    p.segments_.assign(segments_.begin(),
                       segments_.begin() + static_cast<std::ptrdiff_t>(std::min(n, segments_.size())));
    return p;
}

ResourcePath validate_path(std::vector<Segment> segments, const Hierarchy& h) {
    ResourcePath path;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        auto& seg = segments[i];
        auto canon = h.canonical(seg.level);
        if (!canon) throw InvalidPath("unknown level '" + seg.level + "'");
        seg.level = *canon;
        if (seg.pattern) {
            const auto& p = *seg.pattern;
            if (p.empty() || p.find('/') != std::string::npos) {
                throw InvalidPath("bad id pattern '" + p + "' for level '" + seg.level + "'");
            }
        }
        if (i == 0) {
            if (seg.level != h.root()) {
                throw InvalidPath("path must start at '" + h.root() + "', not '" + seg.level + "'");
            }
            continue;
        }
        const auto& parent = segments[i - 1];
        if (!h.allows(parent.level, seg.level)) {
            throw InvalidPath("'" + seg.level + "' cannot follow '" + parent.level + "'");
        }
        if (!parent.pattern) {
            throw InvalidPath("'" + parent.level + "' needs an id before '" + seg.level + "'");
        }
    }
    path.segments_ = std::move(segments);
    return path;
}

ResourcePath parse_path(std::string_view text, const Hierarchy& h) {
    if (text.empty()) return {};
    if (text.front() != '/') throw ParseError("path must start with '/': " + std::string(text));
    std::vector<std::string> parts;
    std::size_t pos = 1;
    while (true) {
        auto next = text.find('/', pos);
        parts.emplace_back(text.substr(pos, next == std::string_view::npos ? next : next - pos));
        if (parts.back().empty()) throw ParseError("empty path component in '" + std::string(text) + "'");
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    std::vector<Segment> segments;
    for (std::size_t i = 0; i < parts.size(); i += 2) {
        Segment s{parts[i], std::nullopt};
        if (i + 1 < parts.size()) s.pattern = parts[i + 1];
        segments.push_back(std::move(s));
    }
    return validate_path(std::move(segments), h);
}

std::string_view to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

Format parse_format(std::string_view s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw ValidationError("unknown format '" + std::string(s) + "'");
}

std::string QueryOptions::query_string() const {
    std::vector<std::string> pairs;
    if (columns) {
        std::string joined;
        for (std::size_t i = 0; i < columns->size(); ++i) {
            if (i) joined += ',';
            joined += percent_encode((*columns)[i], ":/");
        }
        pairs.push_back("columns=" + joined);
    }
    if (xsi_type) pairs.push_back("xsiType=" + percent_encode(*xsi_type, ":"));
    if (format) pairs.push_back("format=" + std::string(to_string(*format)));
    if (pairs.empty()) return {};
    std::string out = "?";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (i) out += '&';
        out += pairs[i];
    }
    return out;
}

UriParts parse_uri(std::string_view uri) {
    // RFC 3986 appendix B.
    static const std::regex re(R"(^(([^:/?#]+):)?(//([^/?#]*))?([^?#]*)(\?([^#]*))?(#(.*))?$)");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_match(uri.begin(), uri.end(), m, re)) {
        throw ParseError("not a URI: " + std::string(uri));
    }
    UriParts parts;
    parts.scheme = m[2].str();
    std::transform(parts.scheme.begin(), parts.scheme.end(), parts.scheme.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (parts.scheme != "http" && parts.scheme != "https") {
        throw ParseError("unsupported URI scheme in '" + std::string(uri) + "'");
    }
    if (!m[3].matched || m[4].length() == 0) {
        throw ParseError("URI has no authority: " + std::string(uri));
    }
    parts.authority = m[4].str();
    std::string hostport = parts.authority;
    if (auto at = hostport.rfind('@'); at != std::string::npos) hostport = hostport.substr(at + 1);
    parts.port = parts.scheme == "https" ? 443 : 80;
    auto colon = hostport.rfind(':');
    auto bracket = hostport.rfind(']');
    if (colon != std::string::npos && (bracket == std::string::npos || colon > bracket)) {
        auto port_text = hostport.substr(colon + 1);
        hostport.resize(colon);
        if (!port_text.empty()) {
            try {
                std::size_t used = 0;
                parts.port = std::stoi(port_text, &used);
                if (used != port_text.size() || parts.port <= 0 || parts.port > 65535) throw 0;
            } catch (...) {
                throw ParseError("bad port in URI: " + std::string(uri));
            }
        }
    }
    if (hostport.empty()) throw ParseError("URI has an empty host: " + std::string(uri));
    parts.host = hostport;
    parts.path = m[5].str();
    if (m[6].matched) parts.query = m[7].str();
    if (m[8].matched) parts.fragment = m[9].str();
    return parts;
}

std::string normalize_base(std::string_view base) {
    std::string b(base);
    if (!b.empty() && b.back() == '/') b.pop_back();
    auto parts = parse_uri(b);
    if (parts.query || parts.fragment) {
        throw ParseError("base URL must not carry a query or fragment: " + std::string(base));
    }
    return b;
}

std::string build_uri(std::string_view base, const ResourcePath& path, const QueryOptions& opts) {
    std::string out = normalize_base(base);
    out += "/REST";
    for (const auto& s : path.segments()) {
        out += '/';
        out += s.level;
        if (s.pattern) {
            out += '/';
            out += percent_encode(*s.pattern, ":@*");
        }
    }
    out += opts.query_string();
    return out;
}

std::string percent_encode(std::string_view s, std::string_view keep) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        bool unreserved = std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~';
        if (unreserved || keep.find(static_cast<char>(c)) != std::string_view::npos) {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 15];
        }
    }
    return out;
}

std::string percent_decode(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
            std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
            out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
            i += 2;
        } else {
            out += s[i];
        }
    }
    return out;
}

}  // namespace restarch

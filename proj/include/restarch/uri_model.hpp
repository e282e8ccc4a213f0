#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace restarch {

/// Parent/child vocabulary of the REST tree. Level names are plain strings
/// so a deployment can extend the tree from a config file; the default
/// instance models the XNAT archive.
class Hierarchy {
public:
    /// projects > subjects > experiments > {scans, assessors,
    /// reconstructions} > resources > files, with resources also allowed
    /// directly under projects, subjects and experiments.
    static std::shared_ptr<const Hierarchy> xnat();

    /// Config shape: {"root": "projects", "levels": {"projects": [...], ...},
    /// "aliases": {"project": "projects"}}. Aliases default to each level
    /// name with its trailing "s" removed.
    static std::shared_ptr<const Hierarchy> from_json(const nlohmann::json& config);
    static std::shared_ptr<const Hierarchy> load(const std::string& path);

    const std::string& root() const noexcept { return root_; }
    bool has_level(std::string_view name) const;
    const std::vector<std::string>& children(std::string_view level) const;
    bool allows(std::string_view parent, std::string_view child) const;
    bool is_terminal(std::string_view level) const;

    /// Maps a plural or singular keyword to its canonical plural name.
    std::optional<std::string> canonical(std::string_view keyword) const;

    /// Every shortest downward chain from `from` (exclusive) to `to`
    /// (inclusive). An empty `from` starts above the root, so the root
    /// itself is the first hop.
    std::vector<std::vector<std::string>> shortest_chains(std::string_view from,
                                                          std::string_view to) const;

    std::vector<std::string> levels() const;

private:
    Hierarchy() = default;
    void check() const;

    std::string root_;
    std::map<std::string, std::vector<std::string>, std::less<>> children_;
    std::map<std::string, std::string, std::less<>> aliases_;
};

/// True if the pattern carries the `*` glob metacharacter.
bool has_glob(std::string_view pattern);

/// `*` matches any run of characters (including none); everything else is
/// literal.
bool glob_match(std::string_view pattern, std::string_view text);

struct Segment {
    std::string level;
    std::optional<std::string> pattern;

    bool operator==(const Segment&) const = default;
};

enum class PathKind { element, collection };

/// Validated alternating sequence of hierarchy levels and id patterns.
class ResourcePath {
public:
    /// The empty root path (`/REST` itself).
    ResourcePath() = default;

    const std::vector<Segment>& segments() const noexcept { return segments_; }
    bool empty() const noexcept { return segments_.empty(); }
    PathKind kind() const noexcept;

    /// No glob anywhere and the final segment names an id.
    bool is_concrete() const noexcept;

    /// `/<level>/<pattern>/...`; the empty path serializes to "".
    std::string str() const;

    const Segment& back() const { return segments_.back(); }

    /// Prefix holding the first `n` segments.
    ResourcePath prefix(std::size_t n) const;

    bool operator==(const ResourcePath&) const = default;

private:
    friend ResourcePath validate_path(std::vector<Segment> segments, const Hierarchy& h);
    std::vector<Segment> segments_;
};

/// Checks the segment sequence against the hierarchy.
/// Throws InvalidPath naming the offending (parent, child) pair.
ResourcePath validate_path(std::vector<Segment> segments, const Hierarchy& h);

/// Parses a plain `/level/pattern/...` string (singular keywords accepted).
ResourcePath parse_path(std::string_view text, const Hierarchy& h);

enum class Format { csv, json };

std::string_view to_string(Format f);
Format parse_format(std::string_view s);

struct QueryOptions {
    std::optional<std::vector<std::string>> columns;
    std::optional<std::string> xsi_type;
    std::optional<Format> format;

    /// `?columns=a,b&xsiType=t&format=csv`, or "" when nothing is set.
    std::string query_string() const;
};

/// Generic URI decomposition (scheme, authority, path, query, fragment).
struct UriParts {
    std::string scheme;
    std::string authority;
    std::string host;
    int port = 0;
    std::string path;
    std::optional<std::string> query;
    std::optional<std::string> fragment;
};

/// Throws ParseError if the text is not an absolute http(s) URI.
UriParts parse_uri(std::string_view uri);

/// Strips a single trailing slash and checks the scheme/authority.
std::string normalize_base(std::string_view base);

/// `<base>/REST<path><query>`.
std::string build_uri(std::string_view base, const ResourcePath& path,
                      const QueryOptions& opts = {});

std::string percent_encode(std::string_view s, std::string_view keep = "");
std::string percent_decode(std::string_view s);

}  // namespace restarch

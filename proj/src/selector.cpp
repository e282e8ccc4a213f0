#include "restarch/selector.hpp"

#include <vector>

#include "restarch/error.hpp"

namespace restarch {

namespace {

struct Token {
    bool shortcut = false;
    std::string level;
    std::optional<std::string> pattern;
};

std::vector<Token> tokenize(std::string_view raw) {
    std::vector<Token> out;
    std::size_t pos = 0;
    auto read_word = [&]() {
        auto end = raw.find('/', pos);
        if (end == std::string_view::npos) end = raw.size();
        std::string w(raw.substr(pos, end - pos));
        pos = end;
        return w;
    };
    while (pos < raw.size()) {
        if (raw[pos] != '/') {
            throw ParseError("expected '/' at offset " + std::to_string(pos) + " in '" + std::string(raw) + "'");
        }
        Token t;
        if (raw.compare(pos, 2, "//") == 0) {
            t.shortcut = true;
            pos += 2;
        } else {
            pos += 1;
        }
        t.level = read_word();
        if (t.level.empty()) {
            throw ParseError("missing level keyword at offset " + std::to_string(pos) + " in '" +
                             std::string(raw) + "'");
        }
        // A single slash followed by a word is the pattern; "//" starts a new segment.
        if (pos < raw.size() && raw.compare(pos, 2, "//") != 0) {
            ++pos;
            auto p = read_word();
            if (p.empty()) throw ParseError("empty pattern in '" + std::string(raw) + "'");
            t.pattern = std::move(p);
        }
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace

Selector::Selector(std::string raw, SelectorForm form, ResourcePath path,
                   std::shared_ptr<const Hierarchy> h)
    : raw_(std::move(raw)), form_(form), expanded_(std::move(path)), hierarchy_(std::move(h)) {}

Selector Selector::root(std::shared_ptr<const Hierarchy> h) {
    return Selector("", SelectorForm::absolute, ResourcePath{}, std::move(h));
}

Selector Selector::from_path(ResourcePath path, std::shared_ptr<const Hierarchy> h) {
    auto checked = validate_path(path.segments(), *h);
    auto raw = checked.str();
    return Selector(std::move(raw), SelectorForm::absolute, std::move(checked), std::move(h));
}

Selector Selector::parse(std::string_view raw, std::shared_ptr<const Hierarchy> h) {
    if (raw.empty()) throw ParseError("empty selector");
    auto tokens = tokenize(raw);

    std::vector<Segment> segments;
    bool shortcut = false;
    for (auto& t : tokens) {
        auto level = h->canonical(t.level);
        if (!level) throw ParseError("unknown level keyword '" + t.level + "'");
        if (t.shortcut) {
            shortcut = true;
            std::string anchor = segments.empty() ? std::string() : segments.back().level;
            auto chains = h->shortest_chains(anchor, *level);
            if (chains.empty()) {
                throw InvalidPath("'" + *level + "' is not reachable from '" +
                                  (anchor.empty() ? std::string("the root") : anchor) + "'");
            }
            if (chains.size() > 1) {
                throw AmbiguousShortcut("'//" + *level + "' has " + std::to_string(chains.size()) +
                                        " equally short expansions from '" +
                                        (anchor.empty() ? std::string("the root") : anchor) + "'");
            }
            if (!segments.empty() && !segments.back().pattern) segments.back().pattern = "*";
            const auto& chain = chains.front();
            for (std::size_t i = 0; i + 1 < chain.size(); ++i) segments.push_back({chain[i], "*"});
            segments.push_back({*level, std::move(t.pattern)});
        } else {
            if (!segments.empty() && !segments.back().pattern) {
                throw InvalidPath("'" + segments.back().level + "' needs an id before '" + *level + "'");
            }
            segments.push_back({*level, std::move(t.pattern)});
        }
    }
    auto path = validate_path(std::move(segments), *h);
    return Selector(std::string(raw), shortcut ? SelectorForm::shortcut : SelectorForm::absolute,
                    std::move(path), std::move(h));
}

Selector Selector::chain(std::string_view level, std::optional<std::string> pattern) const {
    auto canon = hierarchy_->canonical(level);
    if (!canon) throw InvalidPath("unknown level '" + std::string(level) + "'");
    std::vector<Segment> segments = expanded_.segments();
    if (!segments.empty() && !segments.back().pattern) segments.back().pattern = "*";
    segments.push_back({*canon, std::move(pattern)});
    auto path = validate_path(std::move(segments), *hierarchy_);
    auto raw = path.str();
    return Selector(std::move(raw), form_, std::move(path), hierarchy_);
}

}  // namespace restarch

#include "restarch/mapper.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "restarch/error.hpp"
#include "restarch/vocabulary.hpp"

namespace restarch {

namespace {

QueryOptions listing_options() {
    QueryOptions opts;
    opts.columns = std::vector<std::string>{std::string(vocab::kIdColumn), std::string(vocab::kLabelColumn)};
    opts.format = Format::csv;
    return opts;
}

int level_rank(std::string_view level) {
    if (level == "projects") return 0;
    if (level == "subjects") return 1;
    return 2;
}

bool path_has_level(const ResourcePath& p, std::string_view level) {
    for (const auto& s : p.segments()) {
        if (s.level == level) return true;
    }
    return false;
}

}  // namespace

std::optional<std::string> filter_level(std::string_view datatype) {
    if (datatype == "xnat:projectData") return "projects";
    if (datatype == "xnat:subjectData") return "subjects";
    constexpr std::string_view session = "SessionData";
    if (datatype.size() > session.size() && datatype.substr(datatype.size() - session.size()) == session) {
        return "experiments";
    }
    return std::nullopt;
}

// ElementHandle

ElementHandle::ElementHandle(std::shared_ptr<const Session> session, ResourcePath path,
                             std::optional<std::string> label)
    : session_(std::move(session)), path_(std::move(path)), label_(std::move(label)) {
    if (!path_.is_concrete()) throw InvalidPath("element handles need a concrete path, got '" + path_.str() + "'");
}

std::string ElementHandle::uri() const { return session_->uri(path_); }

bool ElementHandle::exists() const {
    auto resp = session_->get(uri(), std::chrono::seconds(0)).response;
    if (resp.ok() || resp.status == 304) return true;
    if (resp.status == 404) return false;
    raise_for_status(resp, "checking " + path_.str());
    return false;
}

void ElementHandle::put(std::optional<std::string> body) const {
    Request req{Method::PUT, uri(), std::move(body), {}};
    if (req.body) req.headers["Content-Type"] = "application/octet-stream";
    raise_for_status(session_->send(std::move(req)), "creating " + path_.str());
    session_->invalidate(path_);
}

void ElementHandle::insert() const {
    for (std::size_t n = 1; n < path_.segments().size(); ++n) {
        ElementHandle ancestor(session_, path_.prefix(n));
        if (!ancestor.exists()) ancestor.put(std::nullopt);
    }
    if (!exists()) put(std::nullopt);
}

void ElementHandle::remove() const {
    Request req{Method::DELETE, uri(), std::nullopt, {}};
    auto resp = session_->send(std::move(req));
    session_->invalidate(path_);
    raise_for_status(resp, "deleting " + path_.str());
}

std::filesystem::path ElementHandle::get_file(const std::optional<std::filesystem::path>& dest) const {
    if (level() != "files") throw ValidationError("get_file needs a file, got '" + path_.str() + "'");
    auto resp = session_->get(uri()).response;
    raise_for_status(resp, "downloading " + path_.str());
    if (dest) {
        if (dest->has_parent_path()) std::filesystem::create_directories(dest->parent_path());
        std::ofstream out(*dest, std::ios::binary | std::ios::trunc);
        out.write(resp.body.data(), static_cast<std::streamsize>(resp.body.size()));
        if (!out) throw Error("cannot write " + dest->string());
        return *dest;
    }
    auto* cache = session_->cache();
    if (!cache) throw ValidationError("get_file without a destination needs a cache");
    auto entry = cache->entry(Cache::canonical_key(Request{Method::GET, uri(), std::nullopt, {}}));
    if (!entry) throw CacheError("downloaded body was not cached: " + path_.str());
    return entry->body_path;
}

void ElementHandle::put_file(const std::filesystem::path& src) const {
    if (level() != "files") throw ValidationError("put_file needs a file, got '" + path_.str() + "'");
    std::ifstream in(src, std::ios::binary);
    if (!in) throw Error("cannot read " + src.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    for (std::size_t n = 1; n < path_.segments().size(); ++n) {
        ElementHandle ancestor(session_, path_.prefix(n));
        if (!ancestor.exists()) ancestor.put(std::nullopt);
    }
    put(std::move(ss).str());
}

std::string ElementHandle::label() const {
    if (label_) return *label_;
    if (level() == "files") return id();
    QueryOptions opts;
    opts.format = Format::json;
    auto resp = session_->get(session_->uri(path_, opts)).response;
    raise_for_status(resp, "reading " + path_.str());
    try {
        auto doc = nlohmann::json::parse(resp.body);
        const auto& item = doc.at("item");
        if (auto it = item.find(vocab::kLabelColumn); it != item.end() && it->is_string()) {
            return it->get<std::string>();
        }
        return id();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed element document for " + path_.str() + ": " + e.what());
    }
}

CollectionHandle ElementHandle::children(std::string_view level) const {
    return CollectionHandle(session_, Selector::from_path(path_, session_->hierarchy_ptr())).chain(level);
}

ElementHandle ElementHandle::child(std::string_view level, std::string id) const {
    auto canon = session_->hierarchy().canonical(level);
    if (!canon) throw InvalidPath("unknown level '" + std::string(level) + "'");
    auto segments = path_.segments();
    segments.push_back({*canon, std::move(id)});
    return ElementHandle(session_, validate_path(std::move(segments), session_->hierarchy()));
}

// ElementStream

ElementStream::ElementStream(std::shared_ptr<const Session> session, ResourcePath path,
                             std::optional<Filter> filter)
    : session_(std::move(session)), path_(std::move(path)), filter_(std::move(filter)) {
    if (path_.empty()) throw InvalidPath("cannot iterate the empty path");
    stack_.push_back(Frame{0, ResourcePath{}, false, {}, 0});
}

void ElementStream::run_filter() {
    filter_ran_ = true;
    const auto& f = *filter_;
    std::string id_col = f.root_element + "/" + std::string(vocab::kFieldID);
    std::string subject_col = f.root_element + "/" + std::string(vocab::kFieldSubjectId);
    QuerySpec spec{f.root_element, {id_col}, f.criteria};
    if (f.level == "experiments") spec.columns.push_back(subject_col);

    auto table = SearchClient(session_).run(spec);
    auto ids = table.column(id_col);
    allowed_[f.level] = std::set<std::string>(ids.begin(), ids.end());
    if (f.level == "experiments") {
        auto subjects = table.column(subject_col);
        allowed_["subjects"] = std::set<std::string>(subjects.begin(), subjects.end());
    }
    if (ids.empty()) done_ = true;
}

bool ElementStream::admitted(const std::string& level, const std::string& id) const {
    auto it = allowed_.find(level);
    return it == allowed_.end() || it->second.count(id) > 0;
}

void ElementStream::load(Frame& frame) {
    frame.loaded = true;
    const auto& seg = path_.segments()[frame.depth];
    bool last = frame.depth + 1 == path_.segments().size();
    bool pruned = allowed_.count(seg.level) > 0;

    // A literal id in the middle of the path needs no listing.
    if (seg.pattern && !has_glob(*seg.pattern) && !last && !pruned) {
        frame.items.push_back(Item{*seg.pattern, std::nullopt});
        return;
    }

    auto segments = frame.prefix.segments();
    segments.push_back({seg.level, std::nullopt});
    auto listing = validate_path(std::move(segments), session_->hierarchy());
    auto resp = session_->get(session_->uri(listing, listing_options())).response;
    if (resp.status == 404) return;
    raise_for_status(resp, "listing " + listing.str());

    auto table = parse_csv(resp.body);
    auto id_idx = table.index_of(vocab::kIdColumn);
    if (!id_idx) throw ParseError("listing of " + listing.str() + " has no ID column");
    auto label_idx = table.index_of(vocab::kLabelColumn);
    for (const auto& row : table.rows()) {
        Item item{row[*id_idx], std::nullopt};
        if (label_idx) item.label = row[*label_idx];
        if (seg.pattern && !glob_match(*seg.pattern, item.id) &&
            !(item.label && glob_match(*seg.pattern, *item.label))) {
            continue;
        }
        if (!admitted(seg.level, item.id)) continue;
        frame.items.push_back(std::move(item));
    }
}

std::optional<ElementHandle> ElementStream::next() {
    if (filter_ && !filter_ran_ && !done_) run_filter();
    while (!done_) {
        if (stack_.empty()) {
            done_ = true;
            break;
        }
        auto& top = stack_.back();
        if (!top.loaded) load(top);
        if (top.pos == top.items.size()) {
            stack_.pop_back();
            continue;
        }
        auto item = top.items[top.pos++];
        auto segments = top.prefix.segments();
        const auto& seg = path_.segments()[top.depth];
        segments.push_back({seg.level, item.id});
        auto path = validate_path(std::move(segments), session_->hierarchy());
        if (top.depth + 1 == path_.segments().size()) {
            return ElementHandle(session_, std::move(path), std::move(item.label));
        }
        stack_.push_back(Frame{top.depth + 1, std::move(path), false, {}, 0});
    }
    return std::nullopt;
}

// CollectionHandle

CollectionHandle::CollectionHandle(std::shared_ptr<const Session> session, Selector selector)
    : session_(std::move(session)), selector_(std::move(selector)) {}

CollectionHandle CollectionHandle::chain(std::string_view level, std::optional<std::string> pattern) const {
    CollectionHandle out(session_, selector_.chain(level, std::move(pattern)));
    if (criteria_) return out.where(*criteria_);
    return out;
}

CollectionHandle CollectionHandle::projects(std::optional<std::string> p) const { return chain("projects", p); }
CollectionHandle CollectionHandle::subjects(std::optional<std::string> p) const { return chain("subjects", p); }
CollectionHandle CollectionHandle::experiments(std::optional<std::string> p) const {
    return chain("experiments", p);
}
CollectionHandle CollectionHandle::scans(std::optional<std::string> p) const { return chain("scans", p); }
CollectionHandle CollectionHandle::assessors(std::optional<std::string> p) const { return chain("assessors", p); }
CollectionHandle CollectionHandle::reconstructions(std::optional<std::string> p) const {
    return chain("reconstructions", p);
}
CollectionHandle CollectionHandle::resources(std::optional<std::string> p) const { return chain("resources", p); }
CollectionHandle CollectionHandle::files(std::optional<std::string> p) const { return chain("files", p); }

CollectionHandle CollectionHandle::where(const CriteriaSet& criteria) const {
    criteria.validate();
    ElementStream::Filter f;
    f.criteria = criteria;
    int best = -1;
    for (const auto& c : criteria.constraints()) {
        auto dt = c.datatype();
        auto level = filter_level(dt);
        if (!level) throw CriteriaError("cannot filter a traversal on datatype '" + dt + "'");
        if (level_rank(*level) > best) {
            best = level_rank(*level);
            f.level = *level;
            f.root_element = dt;
        }
    }
    const auto& p = path();
    bool prunable = path_has_level(p, f.level) || (f.level == "experiments" && path_has_level(p, "subjects"));
    if (!prunable) {
        throw CriteriaError("criteria on " + f.root_element + " cannot filter '" + p.str() + "'");
    }
    CollectionHandle out(session_, selector_);
    out.criteria_ = criteria;
    out.filter_ = std::move(f);
    return out;
}

CollectionHandle CollectionHandle::where(std::string_view criteria_json) const {
    return where(parse_criteria(criteria_json));
}

ElementStream CollectionHandle::iterate() const { return ElementStream(session_, path(), filter_); }

std::optional<ElementHandle> CollectionHandle::first() const { return iterate().next(); }

std::vector<std::string> CollectionHandle::get() const {
    std::vector<std::string> ids;
    auto stream = iterate();
    while (auto e = stream.next()) ids.push_back(e->id());
    return ids;
}

// SearchRunner

SearchRunner::SearchRunner(std::shared_ptr<const Session> session, std::string root_element,
                           std::vector<std::string> columns)
    : session_(std::move(session)), root_element_(std::move(root_element)), columns_(std::move(columns)) {}

QuerySpec SearchRunner::spec(const CriteriaSet& criteria) const {
    QuerySpec s{root_element_, columns_, criteria};
    s.validate();
    return s;
}

ResultTable SearchRunner::where(const CriteriaSet& criteria, Format format) const {
    return SearchClient(session_).run(spec(criteria), format);
}

ResultTable SearchRunner::where(std::string_view criteria_json, Format format) const {
    return where(parse_criteria(criteria_json), format);
}

}  // namespace restarch

#pragma once

#include <filesystem>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "restarch/criteria.hpp"
#include "restarch/search.hpp"
#include "restarch/selector.hpp"
#include "restarch/session.hpp"

namespace restarch {

class CollectionHandle;

/// One archive entity. Constructing a handle never touches the network.
class ElementHandle {
public:
    ElementHandle(std::shared_ptr<const Session> session, ResourcePath path,
                  std::optional<std::string> label = std::nullopt);

    const ResourcePath& path() const noexcept { return path_; }
    const std::string& level() const { return path_.back().level; }
    const std::string& id() const { return *path_.back().pattern; }
    std::string uri() const;

    /// Asks the server, revalidating any cached copy.
    bool exists() const;

    /// Creates the element, creating missing ancestors first. An element
    /// that already exists is left as is.
    void insert() const;

    /// Throws NotFound if the element is absent.
    void remove() const;

    /// Downloads a file through the cache. With `dest` the body is written
    /// there and `dest` is returned; otherwise the cached copy's path is.
    std::filesystem::path get_file(const std::optional<std::filesystem::path>& dest = std::nullopt) const;

    /// Uploads `src` as this file's content, creating ancestors as needed.
    void put_file(const std::filesystem::path& src) const;

    /// The server-reported label; files are labelled by their name.
    std::string label() const;

    CollectionHandle children(std::string_view level) const;
    ElementHandle child(std::string_view level, std::string id) const;

    bool operator==(const ElementHandle& o) const { return path_ == o.path_; }

private:
    void put(std::optional<std::string> body) const;

    std::shared_ptr<const Session> session_;
    ResourcePath path_;
    std::optional<std::string> label_;
};

/// Pull-based traversal of a collection. Listings are requested one level
/// at a time while consuming, depth first, in server listing order.
/// Single consumer.
class ElementStream {
public:
    /// The next element, or nothing once the stream is drained.
    std::optional<ElementHandle> next();

    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = ElementHandle;
        using difference_type = std::ptrdiff_t;
        using pointer = const ElementHandle*;
        using reference = const ElementHandle&;

        iterator() = default;
        explicit iterator(ElementStream* s) : stream_(s) { ++*this; }

        reference operator*() const { return *current_; }
        pointer operator->() const { return &*current_; }
        iterator& operator++() {
            current_ = stream_->next();
            if (!current_) stream_ = nullptr;
            return *this;
        }
        void operator++(int) { ++*this; }
        bool operator==(const iterator& o) const { return stream_ == o.stream_; }

    private:
        ElementStream* stream_ = nullptr;
        std::optional<ElementHandle> current_;
    };

    iterator begin() { return iterator(this); }
    iterator end() { return iterator(); }

private:
    friend class CollectionHandle;

    struct Filter {
        CriteriaSet criteria;
        std::string root_element;
        std::string level;  // deepest level the criteria constrain
    };

    struct Item {
        std::string id;
        std::optional<std::string> label;
    };

    struct Frame {
        std::size_t depth = 0;
        ResourcePath prefix;
        bool loaded = false;
        std::vector<Item> items;
        std::size_t pos = 0;
    };

    ElementStream(std::shared_ptr<const Session> session, ResourcePath path, std::optional<Filter> filter);

    void run_filter();
    void load(Frame& frame);
    bool admitted(const std::string& level, const std::string& id) const;

    std::shared_ptr<const Session> session_;
    ResourcePath path_;
    std::optional<Filter> filter_;
    bool filter_ran_ = false;
    std::map<std::string, std::set<std::string>> allowed_;  // level -> admitted ids
    std::vector<Frame> stack_;
    bool done_ = false;
};

/// A lazily evaluated set of elements named by a selector, optionally
/// narrowed by search criteria. No request is issued until iteration.
class CollectionHandle {
public:
    CollectionHandle(std::shared_ptr<const Session> session, Selector selector);

    const Selector& selector() const noexcept { return selector_; }
    const ResourcePath& path() const noexcept { return selector_.expanded(); }

    CollectionHandle chain(std::string_view level, std::optional<std::string> pattern = std::nullopt) const;
    CollectionHandle projects(std::optional<std::string> pattern = std::nullopt) const;
    CollectionHandle subjects(std::optional<std::string> pattern = std::nullopt) const;
    CollectionHandle experiments(std::optional<std::string> pattern = std::nullopt) const;
    CollectionHandle scans(std::optional<std::string> pattern = std::nullopt) const;
    CollectionHandle assessors(std::optional<std::string> pattern = std::nullopt) const;
    CollectionHandle reconstructions(std::optional<std::string> pattern = std::nullopt) const;
    CollectionHandle resources(std::optional<std::string> pattern = std::nullopt) const;
    CollectionHandle files(std::optional<std::string> pattern = std::nullopt) const;

    /// Restricts traversal to entities matched by a search. The criteria's
    /// datatypes pick the level that is pruned: xnat:projectData prunes
    /// projects, xnat:subjectData subjects, any *SessionData experiments
    /// (and their subjects). Mixed criteria use the deepest level.
    /// Throws CriteriaError if that level cannot prune this path.
    CollectionHandle where(const CriteriaSet& criteria) const;
    CollectionHandle where(std::string_view criteria_json) const;

    const std::optional<CriteriaSet>& criteria() const noexcept { return criteria_; }

    ElementStream iterate() const;

    std::optional<ElementHandle> first() const;
    std::optional<ElementHandle> fetchone() const { return first(); }

    /// Identifiers of every element, in traversal order.
    std::vector<std::string> get() const;
    std::vector<std::string> fetchall() const { return get(); }

private:
    std::shared_ptr<const Session> session_;
    Selector selector_;
    std::optional<CriteriaSet> criteria_;
    std::optional<ElementStream::Filter> filter_;
};

/// `select(row_type, columns)`: a search whose criteria come from where().
class SearchRunner {
public:
    SearchRunner(std::shared_ptr<const Session> session, std::string root_element, std::vector<std::string> columns);

    ResultTable where(const CriteriaSet& criteria, Format format = Format::csv) const;
    ResultTable where(std::string_view criteria_json, Format format = Format::csv) const;

    QuerySpec spec(const CriteriaSet& criteria) const;

private:
    std::shared_ptr<const Session> session_;
    std::string root_element_;
    std::vector<std::string> columns_;
};

using Selection = std::variant<ElementHandle, CollectionHandle>;

/// Level pruned by criteria on `datatype`, or nothing for unknown types.
std::optional<std::string> filter_level(std::string_view datatype);

}  // namespace restarch

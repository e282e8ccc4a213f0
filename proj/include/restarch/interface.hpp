#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "restarch/inspect.hpp"
#include "restarch/manage.hpp"
#include "restarch/mapper.hpp"
#include "restarch/search.hpp"

namespace restarch {

struct ConnectOptions {
    std::string url;
    Credentials credentials;
    std::optional<std::filesystem::path> cache_dir;
    CachePolicy policy;
    std::chrono::milliseconds timeout{30000};
    std::shared_ptr<const Hierarchy> hierarchy = Hierarchy::xnat();
};

/// Front door of the toolkit: selection, search, introspection and
/// administration over one session.
class Interface {
public:
    explicit Interface(std::shared_ptr<const Session> session);

    /// HTTP transport plus an optional disk cache. With `policy.offline`
    /// set the network is never contacted.
    static Interface connect(const ConnectOptions& opts);

    /// Concrete paths give an ElementHandle, anything else a collection.
    Selection select(std::string_view selector) const;

    /// Empty starting point for chained calls: select().projects()...
    CollectionHandle select() const;

    /// Tabular search: select(row_type, columns).where(criteria).
    SearchRunner select(std::string root_element, std::vector<std::string> columns) const;

    CollectionHandle select_collection(std::string_view selector) const;

    /// Throws InvalidPath unless the selector names a single element.
    ElementHandle select_element(std::string_view selector) const;

    SearchClient search() const { return SearchClient(session_); }
    Inspector inspect() const { return Inspector(session_); }
    Manager manage() const { return Manager(session_); }

    const std::shared_ptr<const Session>& session() const noexcept { return session_; }

private:
    std::shared_ptr<const Session> session_;
};

}  // namespace restarch

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "restarch/cache.hpp"
#include "restarch/transport.hpp"
#include "restarch/uri_model.hpp"

namespace restarch {

/// Shared connection state behind every handle: base URL, transport, the
/// optional cache and its policy. Immutable after construction.
class Session {
public:
    Session(std::string base_url, std::shared_ptr<Transport> transport, std::shared_ptr<Cache> cache = nullptr,
            CachePolicy policy = {});

    const std::string& base() const noexcept { return base_; }
    const Hierarchy& hierarchy() const noexcept { return transport_->hierarchy(); }
    const std::shared_ptr<const Hierarchy>& hierarchy_ptr() const noexcept { return transport_->hierarchy_ptr(); }
    Transport& transport() const noexcept { return *transport_; }
    Cache* cache() const noexcept { return cache_.get(); }
    const CachePolicy& policy() const noexcept { return policy_; }

    std::string uri(const ResourcePath& path, const QueryOptions& opts = {}) const;

    /// `<base>/REST<suffix>`.
    std::string endpoint(std::string_view suffix) const;

    /// GET through the cache when one is configured. `window` overrides
    /// the policy's expiration window for this call.
    CachedResponse get(const std::string& uri,
                       std::optional<std::chrono::duration<double>> window = std::nullopt) const;

    /// Search POST; cached like a GET when a cache is configured.
    CachedResponse query(const std::string& uri, std::string body, std::string content_type) const;

    /// Uncached write. Fails with OfflineMiss in offline mode.
    Response send(Request req) const;

    /// Drops cached copies of an element, its subtree and the listing of
    /// its parent collection.
    void invalidate(const ResourcePath& element) const;

private:
    std::string base_;
    std::shared_ptr<Transport> transport_;
    std::shared_ptr<Cache> cache_;
    CachePolicy policy_;
};

/// Maps non-2xx statuses to the error hierarchy.
void raise_for_status(const Response& resp, std::string_view context);

}  // namespace restarch

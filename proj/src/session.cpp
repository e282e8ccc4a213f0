#include "restarch/session.hpp"

#include "restarch/error.hpp"

namespace restarch {

Session::Session(std::string base_url, std::shared_ptr<Transport> transport, std::shared_ptr<Cache> cache,
                 CachePolicy policy)
    : base_(normalize_base(base_url)), transport_(std::move(transport)), cache_(std::move(cache)), policy_(policy) {
    if (!transport_) throw ValidationError("session needs a transport");
}

std::string Session::uri(const ResourcePath& path, const QueryOptions& opts) const {
    return build_uri(base_, path, opts);
}

std::string Session::endpoint(std::string_view suffix) const { return base_ + "/REST" + std::string(suffix); }

CachedResponse Session::get(const std::string& uri, std::optional<std::chrono::duration<double>> window) const {
    Request req{Method::GET, uri, std::nullopt, {}};
    if (cache_) {
        auto policy = policy_;
        if (window) policy.expiration_window = *window;
        return cache_->fetch(req, policy);
    }
    if (policy_.offline) throw OfflineMiss("offline mode needs a cache: " + uri);
    return CachedResponse{transport_->execute(req), Provenance::network};
}

CachedResponse Session::query(const std::string& uri, std::string body, std::string content_type) const {
    Request req{Method::POST, uri, std::move(body), {{"Content-Type", std::move(content_type)}}};
    if (cache_) return cache_->fetch(req, policy_);
    if (policy_.offline) throw OfflineMiss("offline mode needs a cache: " + uri);
    return CachedResponse{transport_->execute(req), Provenance::network};
}

Response Session::send(Request req) const {
    if (policy_.offline) {
        throw OfflineMiss(std::string("offline: cannot ") + std::string(to_string(req.method)) + " " + req.uri);
    }
    return transport_->execute(req);
}

void Session::invalidate(const ResourcePath& element) const {
    if (!cache_ || element.empty()) return;
    auto key_of = [&](const ResourcePath& p) { return Cache::canonical_key(Request{Method::GET, uri(p), {}, {}}); };
    auto self = key_of(element);
    cache_->clear(self + "/");
    cache_->clear(self + "?");
    cache_->erase(self);
    // Parent listing: same path without the final id.
    auto segs = element.segments();
    ResourcePath listing = element.prefix(segs.size() - 1);
    std::string listing_key = key_of(listing) + "/" + segs.back().level;
    cache_->clear(listing_key + "?");
    cache_->erase(listing_key);
}

void raise_for_status(const Response& resp, std::string_view context) {
    if (resp.ok() || resp.status == 304) return;
    std::string msg = std::string(context) + ": HTTP " + std::to_string(resp.status);
    if (!resp.body.empty() && resp.body.size() < 300) msg += " (" + resp.body + ")";
    switch (resp.status) {
        case 401: throw AuthError(msg);
        case 403: throw Forbidden(msg);
        case 404: throw NotFound(msg);
        case 409: throw Conflict(msg);
        default: throw HttpError(resp.status, msg);
    }
}

}  // namespace restarch

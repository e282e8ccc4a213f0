#pragma once

#include <chrono>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "restarch/http_date.hpp"
#include "restarch/transport.hpp"

namespace restarch {

class Clock {
public:
    virtual ~Clock() = default;
    virtual TimePoint now() const = 0;
};

class SystemClock : public Clock {
public:
    TimePoint now() const override { return std::chrono::system_clock::now(); }
};

/// Test clock that only moves when told to.
class ManualClock : public Clock {
public:
    explicit ManualClock(TimePoint start = std::chrono::system_clock::now()) : now_(start) {}
    TimePoint now() const override;
    void advance(std::chrono::duration<double> d);

private:
    mutable std::mutex mutex_;
    TimePoint now_;
};

struct CachePolicy {
    std::chrono::duration<double> expiration_window{1.0};
    bool offline = false;
};

enum class Provenance { network, cache, validated };

std::string_view to_string(Provenance p);

struct CachedResponse {
    Response response;
    Provenance provenance = Provenance::network;
};

struct CacheEntry {
    std::string key;
    std::filesystem::path body_path;
    TimePoint fetched_at;
    std::optional<std::string> last_modified;
    std::string content_type;
};

struct CacheStatus {
    std::size_t entries = 0;
    std::uintmax_t bytes = 0;
};

/// Disk-backed HTTP response cache.
///
/// Layout: `<dir>/<sha256(key)>.body` holds the response body and
/// `<dir>/<sha256(key)>.meta` a JSON record
/// `{"key", "fetched_at", "last_modified", "content_type"}` where
/// fetched_at is seconds since the Unix epoch. `<dir>/.lock` is held with
/// flock() for the cache's lifetime; a second holder is rejected.
///
/// Within the expiration window an entry is served without network
/// traffic. Past it, entries carrying Last-Modified are revalidated with
/// If-Modified-Since; the rest are fetched again. In offline mode any
/// entry is served regardless of age and misses raise OfflineMiss.
///
/// Concurrent fetches of one key share a single network call.
class Cache {
public:
    Cache(std::filesystem::path dir, std::shared_ptr<Transport> transport,
          std::shared_ptr<const Clock> clock = std::make_shared<SystemClock>());
    ~Cache();

    Cache(const Cache&) = delete;
    Cache& operator=(const Cache&) = delete;

    /// GET requests, plus POSTs to the search endpoint (keyed by body
    /// digest). Other verbs throw ValidationError.
    CachedResponse fetch(const Request& req, const CachePolicy& policy = {});

    /// Path plus lexicographically sorted query pairs; search POSTs append
    /// `#<sha256(body)>`.
    static std::string canonical_key(const Request& req);

    std::size_t clear();
    std::size_t clear(std::string_view key_prefix);

    /// Removes exactly one key; false if it was not cached.
    bool erase(std::string_view key);

    std::optional<CacheEntry> entry(std::string_view key) const;
    std::vector<CacheEntry> entries() const;
    CacheStatus status() const;

    const std::filesystem::path& dir() const noexcept { return dir_; }
    Transport& transport() noexcept { return *transport_; }

private:
    CachedResponse fetch_uncoalesced(const std::string& key, const Request& req, const CachePolicy& policy);
    std::optional<std::string> read_body(const CacheEntry& e) const;
    void store(const std::string& key, const Response& resp, TimePoint when);
    void write_meta(const CacheEntry& e) const;
    void erase_files(const CacheEntry& e) const;
    void load_index();

    std::filesystem::path dir_;
    std::shared_ptr<Transport> transport_;
    std::shared_ptr<const Clock> clock_;
    int lock_fd_ = -1;

    mutable std::shared_mutex index_mutex_;
    std::map<std::string, CacheEntry, std::less<>> index_;

    std::mutex inflight_mutex_;
    std::map<std::string, std::shared_future<CachedResponse>> inflight_;
};

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

}  // namespace restarch

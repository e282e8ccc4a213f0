#include "restarch/cache.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"
#include "restarch/error.hpp"

namespace fs = std::filesystem;

namespace restarch {

TimePoint ManualClock::now() const {
    std::lock_guard lock(mutex_);
    return now_;
}

void ManualClock::advance(std::chrono::duration<double> d) {
    std::lock_guard lock(mutex_);
    now_ += std::chrono::duration_cast<std::chrono::system_clock::duration>(d);
}

std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::network: return "network";
        case Provenance::cache: return "cache";
        case Provenance::validated: return "validated";
    }
    return "?";
}

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw CacheError("SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

namespace {

double to_epoch_seconds(TimePoint t) {
    return std::chrono::duration<double>(t.time_since_epoch()).count();
}

TimePoint from_epoch_seconds(double s) {
    return TimePoint(std::chrono::duration_cast<std::chrono::system_clock::duration>(std::chrono::duration<double>(s)));
}

void write_atomically(const fs::path& target, std::string_view data) {
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CacheError("cannot write " + tmp.string());
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out) throw CacheError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw CacheError("cannot publish " + target.string() + ": " + ec.message());
}

}  // namespace

Cache::Cache(fs::path dir, std::shared_ptr<Transport> transport, std::shared_ptr<const Clock> clock)
    : dir_(std::move(dir)), transport_(std::move(transport)), clock_(std::move(clock)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw CacheError("cannot create cache directory " + dir_.string() + ": " + ec.message());
    auto lock_path = dir_ / ".lock";
    lock_fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (lock_fd_ < 0) throw CacheError("cannot open " + lock_path.string());
    if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
        ::close(lock_fd_);
        lock_fd_ = -1;
        throw CacheError("cache directory " + dir_.string() + " is in use by another process");
    }
    load_index();
}

Cache::~Cache() {
    if (lock_fd_ >= 0) {
        ::flock(lock_fd_, LOCK_UN);
        ::close(lock_fd_);
    }
}

void Cache::load_index() {
    for (const auto& de : fs::directory_iterator(dir_)) {
        if (de.path().extension() != ".meta") continue;
        try {
            std::ifstream in(de.path());
            auto meta = nlohmann::json::parse(in);
            CacheEntry e;
            e.key = meta.at("key").get<std::string>();
            auto digest = sha256_hex(e.key);
            if (de.path().stem() != digest) continue;
            e.body_path = dir_ / (digest + ".body");
            if (!fs::exists(e.body_path)) continue;
            e.fetched_at = from_epoch_seconds(meta.at("fetched_at").get<double>());
            if (!meta.at("last_modified").is_null()) e.last_modified = meta["last_modified"].get<std::string>();
            e.content_type = meta.value("content_type", "");
            index_[e.key] = std::move(e);
        } catch (const std::exception&) {
            // unreadable record: leave it for clear() and treat as a miss
        }
    }
}

std::string Cache::canonical_key(const Request& req) {
    auto parts = parse_uri(req.uri);
    std::string key = parts.path;
    if (parts.query && !parts.query->empty()) {
        std::vector<std::string> pairs;
        std::stringstream ss(*parts.query);
        std::string p;
        while (std::getline(ss, p, '&')) {
            if (!p.empty()) pairs.push_back(p);
        }
        std::sort(pairs.begin(), pairs.end());
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            key += (i == 0 ? '?' : '&');
            key += pairs[i];
        }
    }
    if (req.method == Method::POST) key += "#" + sha256_hex(req.body.value_or(""));
    return key;
}

CachedResponse Cache::fetch(const Request& req, const CachePolicy& policy) {
    if (req.method != Method::GET &&
        !(req.method == Method::POST && classify_uri(req.uri, transport_->hierarchy()) == UriClass::search)) {
        throw ValidationError("only GET and search POST requests are cacheable");
    }
    auto key = canonical_key(req);

    std::promise<CachedResponse> promise;
    {
        std::unique_lock lock(inflight_mutex_);
        if (auto it = inflight_.find(key); it != inflight_.end()) {
            auto fut = it->second;
            lock.unlock();
            return fut.get();
        }
        inflight_.emplace(key, promise.get_future().share());
    }
    try {
        auto result = fetch_uncoalesced(key, req, policy);
        promise.set_value(result);
        std::lock_guard lock(inflight_mutex_);
        inflight_.erase(key);
        return result;
    } catch (...) {
        promise.set_exception(std::current_exception());
        std::lock_guard lock(inflight_mutex_);
        inflight_.erase(key);
        throw;
    }
}

CachedResponse Cache::fetch_uncoalesced(const std::string& key, const Request& req, const CachePolicy& policy) {
    auto cached = entry(key);
    std::optional<std::string> body;
    if (cached) {
        body = read_body(*cached);
        if (!body) cached.reset();
    }
    auto from_entry = [&](const CacheEntry& e, std::string b, Provenance p) {
        CachedResponse out;
        out.response.status = 200;
        out.response.body = std::move(b);
        if (!e.content_type.empty()) out.response.headers["Content-Type"] = e.content_type;
        if (e.last_modified) out.response.headers["Last-Modified"] = *e.last_modified;
        out.provenance = p;
        return out;
    };

    if (policy.offline) {
        if (!cached) throw OfflineMiss("offline and not cached: " + key);
        return from_entry(*cached, std::move(*body), Provenance::cache);
    }

    auto now = clock_->now();
    if (cached && now - cached->fetched_at < policy.expiration_window) {
        return from_entry(*cached, std::move(*body), Provenance::cache);
    }

    Request outgoing = req;
    if (cached && cached->last_modified) outgoing.headers["If-Modified-Since"] = *cached->last_modified;
    Response resp = transport_->execute(outgoing);

    if (resp.status == 304 && cached) {
        CacheEntry refreshed = *cached;
        refreshed.fetched_at = now;
        write_meta(refreshed);
        {
            std::unique_lock lock(index_mutex_);
            index_[key] = refreshed;
        }
        return from_entry(refreshed, std::move(*body), Provenance::validated);
    }
    if (resp.status == 200) {
        store(key, resp, now);
    } else if (resp.status == 404 && cached) {
        erase(key);
    }
    return CachedResponse{std::move(resp), Provenance::network};
}

std::optional<std::string> Cache::read_body(const CacheEntry& e) const {
    std::ifstream in(e.body_path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void Cache::store(const std::string& key, const Response& resp, TimePoint when) {
    auto digest = sha256_hex(key);
    CacheEntry e;
    e.key = key;
    e.body_path = dir_ / (digest + ".body");
    e.fetched_at = when;
    e.last_modified = resp.header("Last-Modified");
    e.content_type = resp.header("Content-Type").value_or("");
    std::unique_lock lock(index_mutex_);
    write_atomically(e.body_path, resp.body);
    write_meta(e);
    index_[key] = std::move(e);
}

void Cache::write_meta(const CacheEntry& e) const {
    nlohmann::json meta = {
        {"key", e.key},
        {"fetched_at", to_epoch_seconds(e.fetched_at)},
        {"last_modified", e.last_modified ? nlohmann::json(*e.last_modified) : nlohmann::json(nullptr)},
        {"content_type", e.content_type},
    };
    write_atomically(dir_ / (sha256_hex(e.key) + ".meta"), meta.dump());
}

void Cache::erase_files(const CacheEntry& e) const {
    std::error_code ec;
    fs::remove(e.body_path, ec);
    if (ec) throw CacheError("cannot remove " + e.body_path.string() + ": " + ec.message());
    fs::remove(dir_ / (sha256_hex(e.key) + ".meta"), ec);
    if (ec) throw CacheError("cannot remove metadata for " + e.key + ": " + ec.message());
}

std::size_t Cache::clear() { return clear(""); }

std::size_t Cache::clear(std::string_view key_prefix) {
    std::unique_lock lock(index_mutex_);
    std::size_t removed = 0;
    for (auto it = index_.begin(); it != index_.end();) {
        if (it->first.compare(0, key_prefix.size(), key_prefix) == 0) {
            erase_files(it->second);
            it = index_.erase(it);
            ++removed;
        } else {
            ++it;
        }
    }
    return removed;
}

bool Cache::erase(std::string_view key) {
    std::unique_lock lock(index_mutex_);
    auto it = index_.find(key);
    if (it == index_.end()) return false;
    erase_files(it->second);
    index_.erase(it);
    return true;
}

std::optional<CacheEntry> Cache::entry(std::string_view key) const {
    std::shared_lock lock(index_mutex_);
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<CacheEntry> Cache::entries() const {
    std::shared_lock lock(index_mutex_);
    std::vector<CacheEntry> out;
    for (const auto& [k, e] : index_) out.push_back(e);
    return out;
}

CacheStatus Cache::status() const {
    std::shared_lock lock(index_mutex_);
    CacheStatus s;
    s.entries = index_.size();
    for (const auto& [k, e] : index_) {
        std::error_code ec;
        auto sz = fs::file_size(e.body_path, ec);
        if (!ec) s.bytes += sz;
    }
    return s;
}

}  // namespace restarch

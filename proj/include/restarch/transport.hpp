#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "restarch/uri_model.hpp"

namespace restarch {

struct CaseInsensitiveLess {
    bool operator()(std::string_view a, std::string_view b) const noexcept;
    using is_transparent = void;
};

using Headers = std::map<std::string, std::string, CaseInsensitiveLess>;

enum class Method { GET, PUT, POST, DELETE };

std::string_view to_string(Method m);

struct Request {
    Method method = Method::GET;
    std::string uri;
    std::optional<std::string> body;
    Headers headers;
};

struct Response {
    int status = 0;
    Headers headers;
    std::string body;

    bool ok() const noexcept { return status >= 200 && status < 300; }
    std::optional<std::string> header(std::string_view name) const;
};

struct Credentials {
    std::string user;
    std::string secret;

    bool empty() const noexcept { return user.empty(); }
};

struct CallCounts {
    std::uint64_t get = 0;
    std::uint64_t put = 0;
    std::uint64_t post = 0;
    std::uint64_t del = 0;
    std::uint64_t body_bytes = 0;  // response body bytes received

    std::uint64_t total() const noexcept { return get + put + post + del; }
    bool operator==(const CallCounts&) const = default;
};

/// How a URI is treated by the verb rules: collection URIs are GET-only,
/// element URIs accept GET/PUT/DELETE, the search endpoint accepts POST.
enum class UriClass { collection, element, search, other };

UriClass classify_uri(std::string_view uri, const Hierarchy& h);

/// The single seam between client logic and the network. Subclasses
/// implement send(); execute() enforces the verb rules client-side,
/// counts calls and keeps an ordered call log. Safe for concurrent use.
class Transport {
public:
    explicit Transport(std::shared_ptr<const Hierarchy> h = Hierarchy::xnat());
    virtual ~Transport() = default;

    Transport(const Transport&) = delete;
    Transport& operator=(const Transport&) = delete;

    /// Throws MethodNotAllowed before any network traffic for forbidden
    /// verb/URI pairs, AuthError on 401, NetworkError when unreachable.
    Response execute(const Request& req);

    CallCounts call_count() const;
    void reset_counts();

    /// "METHOD URI" per call, in issue order.
    std::vector<std::string> call_log() const;

    const Hierarchy& hierarchy() const noexcept { return *hierarchy_; }
    const std::shared_ptr<const Hierarchy>& hierarchy_ptr() const noexcept { return hierarchy_; }

protected:
    virtual Response send(const Request& req) = 0;

private:
    std::shared_ptr<const Hierarchy> hierarchy_;
    std::atomic<std::uint64_t> get_{0}, put_{0}, post_{0}, del_{0}, bytes_{0};
    mutable std::mutex log_mutex_;
    std::vector<std::string> log_;
};

struct HttpOptions {
    Credentials credentials;
    std::chrono::milliseconds timeout{30000};
    std::string user_agent = "restarch/1.0";
};

/// HTTP/1.1 transport. Adds HTTP Basic authentication when credentials are
/// present and follows at most 5 redirects. Each call uses its own
/// connection, so concurrent calls proceed in parallel.
class HttpTransport : public Transport {
public:
    explicit HttpTransport(HttpOptions opts = {}, std::shared_ptr<const Hierarchy> h = Hierarchy::xnat());

protected:
    Response send(const Request& req) override;

private:
    Response send_once(const Request& req);

    HttpOptions opts_;
};

/// A transport with the network switched off: every call fails with
/// NetworkError. Used for offline runs.
class DisconnectedTransport : public Transport {
public:
    using Transport::Transport;

protected:
    Response send(const Request& req) override;
};

}  // namespace restarch

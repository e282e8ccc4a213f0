#include "httplib_config.hpp"

#include "restarch/transport.hpp"

#include <algorithm>
#include <cctype>

#include "restarch/error.hpp"

namespace restarch {

bool CaseInsensitiveLess::operator()(std::string_view a, std::string_view b) const noexcept {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
        return std::tolower(static_cast<unsigned char>(x)) < std::tolower(static_cast<unsigned char>(y));
    });
}

std::string_view to_string(Method m) {
    switch (m) {
        case Method::GET: return "GET";
        case Method::PUT: return "PUT";
        case Method::POST: return "POST";
        case Method::DELETE: return "DELETE";
    }
    return "?";
}

std::optional<std::string> Response::header(std::string_view name) const {
    auto it = headers.find(name);
    if (it == headers.end()) return std::nullopt;
    return it->second;
}

UriClass classify_uri(std::string_view uri, const Hierarchy& h) {
    auto parts = parse_uri(uri);
    const std::string& path = parts.path;
    auto rest = path.find("/REST");
    if (rest == std::string::npos) return UriClass::other;
    std::string tail = path.substr(rest + 5);
    if (tail == "/search") return UriClass::search;
    if (tail.empty()) return UriClass::collection;
    try {
        auto p = parse_path(percent_decode(tail), h);
        return p.kind() == PathKind::element ? UriClass::element : UriClass::collection;
    } catch (const Error&) {
        return UriClass::other;
    }
}

Transport::Transport(std::shared_ptr<const Hierarchy> h) : hierarchy_(std::move(h)) {}

Response Transport::execute(const Request& req) {
    auto cls = classify_uri(req.uri, *hierarchy_);
    bool allowed = true;
    switch (cls) {
        case UriClass::collection: allowed = req.method == Method::GET; break;
        case UriClass::element: allowed = req.method != Method::POST; break;
        case UriClass::search: allowed = req.method == Method::POST; break;
        case UriClass::other: break;
    }
    if (!allowed) {
        throw MethodNotAllowed(std::string(to_string(req.method)) + " is not allowed on " + req.uri);
    }

    switch (req.method) {
        case Method::GET: ++get_; break;
        case Method::PUT: ++put_; break;
        case Method::POST: ++post_; break;
        case Method::DELETE: ++del_; break;
    }
    {
        std::lock_guard lock(log_mutex_);
        log_.push_back(std::string(to_string(req.method)) + " " + req.uri);
    }

    Response resp = send(req);
    bytes_ += resp.body.size();
    if (resp.status == 401) throw AuthError("authentication failed for " + req.uri);
    return resp;
}

CallCounts Transport::call_count() const {
    return CallCounts{get_.load(), put_.load(), post_.load(), del_.load(), bytes_.load()};
}

void Transport::reset_counts() {
    get_ = put_ = post_ = del_ = bytes_ = 0;
    std::lock_guard lock(log_mutex_);
    log_.clear();
}

std::vector<std::string> Transport::call_log() const {
    std::lock_guard lock(log_mutex_);
    return log_;
}

HttpTransport::HttpTransport(HttpOptions opts, std::shared_ptr<const Hierarchy> h)
    : Transport(std::move(h)), opts_(std::move(opts)) {}

namespace {

constexpr int kMaxRedirects = 5;

bool is_redirect(int status) {
    return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

}  // namespace

Response HttpTransport::send(const Request& req) {
    // Redirects are followed here rather than by httplib, which also treats
    // 304 as a redirect and fails on it.
    Request current = req;
    for (int hop = 0;; ++hop) {
        Response resp = send_once(current);
        auto location = resp.header("Location");
        if (!is_redirect(resp.status) || !location) return resp;
        if (hop == kMaxRedirects) throw NetworkError("too many redirects from " + req.uri);
        if (location->rfind("http://", 0) == 0 || location->rfind("https://", 0) == 0) {
            current.uri = *location;
        } else {
            auto parts = parse_uri(current.uri);
            current.uri = parts.scheme + "://" + parts.authority + *location;
        }
        if (resp.status == 303) {
            current.method = Method::GET;
            current.body.reset();
        }
    }
}

Response HttpTransport::send_once(const Request& req) {
    auto parts = parse_uri(req.uri);
    std::string origin = parts.scheme + "://" + parts.authority;
    std::string target = parts.path.empty() ? "/" : parts.path;
    if (parts.query) target += "?" + *parts.query;

    httplib::Client client(origin);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(opts_.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(opts_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    for (const auto& [k, v] : req.headers) headers.emplace(k, v);
    if (!opts_.credentials.empty()) {
        headers.insert(httplib::make_basic_authentication_header(opts_.credentials.user, opts_.credentials.secret));
    }
    headers.emplace("User-Agent", opts_.user_agent);

    std::string content_type = "application/octet-stream";
    if (auto it = req.headers.find("Content-Type"); it != req.headers.end()) content_type = it->second;
    const std::string body = req.body.value_or("");

    httplib::Result res{nullptr, httplib::Error::Unknown};
    switch (req.method) {
        case Method::GET: res = client.Get(target, headers); break;
        case Method::PUT: res = client.Put(target, headers, body, content_type); break;
        case Method::POST: res = client.Post(target, headers, body, content_type); break;
        case Method::DELETE: res = client.Delete(target, headers, body, content_type); break;
    }
    if (!res) {
        throw NetworkError(std::string(to_string(req.method)) + " " + req.uri + ": " + httplib::to_string(res.error()));
    }
    Response out;
    out.status = res->status;
    for (const auto& [k, v] : res->headers) out.headers[k] = v;
    out.body = std::move(res->body);
    return out;
}

Response DisconnectedTransport::send(const Request& req) {
    throw NetworkError("network disabled: " + std::string(to_string(req.method)) + " " + req.uri);
}

}  // namespace restarch

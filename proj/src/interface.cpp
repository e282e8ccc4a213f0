#include "restarch/interface.hpp"

#include "restarch/error.hpp"

namespace restarch {

Interface::Interface(std::shared_ptr<const Session> session) : session_(std::move(session)) {
    if (!session_) throw ValidationError("interface needs a session");
}

Interface Interface::connect(const ConnectOptions& opts) {
    std::shared_ptr<Transport> transport;
    if (opts.policy.offline) {
        transport = std::make_shared<DisconnectedTransport>(opts.hierarchy);
    } else {
        HttpOptions http;
        http.credentials = opts.credentials;
        http.timeout = opts.timeout;
        transport = std::make_shared<HttpTransport>(http, opts.hierarchy);
    }
    std::shared_ptr<Cache> cache;
    if (opts.cache_dir) cache = std::make_shared<Cache>(*opts.cache_dir, transport);
    return Interface(std::make_shared<Session>(opts.url, transport, cache, opts.policy));
}

Selection Interface::select(std::string_view selector) const {
    auto sel = Selector::parse(selector, session_->hierarchy_ptr());
    if (sel.expanded().is_concrete()) return ElementHandle(session_, sel.expanded());
    return CollectionHandle(session_, std::move(sel));
}

CollectionHandle Interface::select() const { return CollectionHandle(session_, Selector::root(session_->hierarchy_ptr())); }

SearchRunner Interface::select(std::string root_element, std::vector<std::string> columns) const {
    return SearchRunner(session_, std::move(root_element), std::move(columns));
}

CollectionHandle Interface::select_collection(std::string_view selector) const {
    return CollectionHandle(session_, Selector::parse(selector, session_->hierarchy_ptr()));
}

ElementHandle Interface::select_element(std::string_view selector) const {
    auto sel = Selector::parse(selector, session_->hierarchy_ptr());
    if (!sel.expanded().is_concrete()) {
        throw InvalidPath("'" + std::string(selector) + "' does not name a single element");
    }
    return ElementHandle(session_, sel.expanded());
}

}  // namespace restarch

#include "restarch/manage.hpp"

#include <algorithm>

#include "restarch/error.hpp"
#include "restarch/vocabulary.hpp"

namespace restarch {

namespace {

template <std::size_t N>
bool one_of(const std::array<std::string_view, N>& options, std::string_view value) {
    return std::find(options.begin(), options.end(), value) != options.end();
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
}

}  // namespace

ProjectAdmin::ProjectAdmin(std::shared_ptr<const Session> session, std::string project_id)
    : session_(std::move(session)), project_(std::move(project_id)) {
    if (project_.empty() || project_.find('/') != std::string::npos) {
        throw ValidationError("bad project id '" + project_ + "'");
    }
}

std::string ProjectAdmin::project_uri() const { return session_->endpoint("/projects/" + percent_encode(project_)); }

void ProjectAdmin::set_accessibility(std::string_view level) const {
    if (!one_of(vocab::kAccessibilityLevels, level)) {
        throw ValidationError("accessibility must be public, protected or private, got '" + std::string(level) + "'");
    }
    auto uri = project_uri() + "/" + std::string(vocab::kAccessibility) + "/" + std::string(level);
    raise_for_status(session_->send(Request{Method::PUT, uri, std::nullopt, {}}),
                     "setting accessibility of " + project_);
}

std::string ProjectAdmin::get_accessibility() const {
    auto uri = project_uri() + "/" + std::string(vocab::kAccessibility);
    auto resp = session_->get(uri, std::chrono::seconds(0)).response;
    raise_for_status(resp, "reading accessibility of " + project_);
    return trim(resp.body);
}

void ProjectAdmin::add_user(std::string_view user, std::string_view role) const {
    if (!one_of(vocab::kRoles, role)) {
        throw ValidationError("role must be owner, member or collaborator, got '" + std::string(role) + "'");
    }
    if (user.empty() || user.find('/') != std::string_view::npos) {
        throw ValidationError("bad user name '" + std::string(user) + "'");
    }
    auto uri = project_uri() + "/" + std::string(vocab::kUsers) + "/" + std::string(role) + "/" + percent_encode(user);
    raise_for_status(session_->send(Request{Method::PUT, uri, std::nullopt, {}}),
                     "adding " + std::string(user) + " to " + project_);
}

void ProjectAdmin::remove_user(std::string_view user) const {
    auto members = users();
    auto it = members.find(std::string(user));
    if (it == members.end()) {
        throw NotFound("user '" + std::string(user) + "' is not a member of " + project_);
    }
    auto uri = project_uri() + "/" + std::string(vocab::kUsers) + "/" + it->second + "/" + percent_encode(user);
    raise_for_status(session_->send(Request{Method::DELETE, uri, std::nullopt, {}}),
                     "removing " + std::string(user) + " from " + project_);
}

std::map<std::string, std::string> ProjectAdmin::users() const {
    auto uri = project_uri() + "/" + std::string(vocab::kUsers) + "?format=csv";
    auto resp = session_->get(uri, std::chrono::seconds(0)).response;
    raise_for_status(resp, "listing users of " + project_);
    auto table = parse_csv(resp.body);
    auto logins = table.column(vocab::kLoginColumn);
    auto roles = table.column(vocab::kRoleColumn);
    std::map<std::string, std::string> out;
    for (std::size_t i = 0; i < logins.size(); ++i) out[logins[i]] = roles[i];
    return out;
}

}  // namespace restarch

#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "restarch/search.hpp"
#include "restarch/session.hpp"

namespace restarch {

/// Accessibility level and member roles of one project.
class ProjectAdmin {
public:
    ProjectAdmin(std::shared_ptr<const Session> session, std::string project_id);

    const std::string& project_id() const noexcept { return project_; }

    /// One of public, protected, private; anything else is rejected
    /// client-side with ValidationError.
    void set_accessibility(std::string_view level) const;
    std::string get_accessibility() const;

    /// Gives `user` a role, replacing any role the user had before.
    void add_user(std::string_view user, std::string_view role) const;

    /// Throws NotFound if the user is not a member.
    void remove_user(std::string_view user) const;

    /// login -> role.
    std::map<std::string, std::string> users() const;

private:
    std::string project_uri() const;

    std::shared_ptr<const Session> session_;
    std::string project_;
};

/// Entry point for administration: projects and stored searches.
class Manager {
public:
    explicit Manager(std::shared_ptr<const Session> session) : session_(std::move(session)) {}

    ProjectAdmin project(std::string id) const { return ProjectAdmin(session_, std::move(id)); }
    SearchClient search() const { return SearchClient(session_); }

private:
    std::shared_ptr<const Session> session_;
};

}  // namespace restarch

#pragma once

#include <ctime>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "restarch/mock/fixture.hpp"
#include "restarch/uri_model.hpp"

namespace restarch::mock {

/// Boolean tree used by the mock's own search evaluator. Deliberately
/// separate from the client's criteria types.
struct Condition {
    std::string schema_field;
    std::string comparison;
    std::string value;
};

/// Either a leaf condition or an AND/OR set of nodes.
struct ConditionNode {
    std::optional<Condition> leaf;
    std::string method;  // "AND" or "OR" for sets
    std::vector<ConditionNode> items;
};

/// Field lookup for one entity: nullopt for unknown fields.
using FieldLookup = std::function<std::optional<std::string>(const std::string& schema_field)>;

/// Recursive AND/OR evaluation. A constraint on an unknown field is false.
bool evaluate_criteria(const ConditionNode& node, const FieldLookup& lookup);

/// Typed comparison used by evaluate_criteria.
bool compare(const std::string& lhs, const std::string& op, const std::string& rhs);

/// Embedded archive server on 127.0.0.1. Serves listings, elements, file
/// bodies with Last-Modified validation, the search endpoint, schema
/// introspection, saved searches and project administration. Requests are
/// served concurrently; mutations are serialized.
class MockServer {
public:
    /// Port 0 picks an ephemeral port. Throws PortUnavailable if the port
    /// cannot be bound and ValidationError for an invalid fixture.
    explicit MockServer(Fixture fixture, int port = 0,
                        std::shared_ptr<const Hierarchy> h = Hierarchy::xnat());
    ~MockServer();

    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;

    int port() const noexcept { return port_; }
    std::string url() const;

    /// Replaces the whole archive state.
    void reset(Fixture fixture);
    Fixture snapshot() const;

    /// Changes a file's modification time (and optionally its content).
    /// `path` is a REST path such as "/projects/P/.../files/a.img".
    void touch(const std::string& path, std::time_t last_modified,
               std::optional<std::string> content = std::nullopt);

    /// "METHOD /REST/...?query" per request, in arrival order.
    std::vector<std::string> request_log() const;
    void clear_log();

private:
    struct State;
    std::unique_ptr<State> state_;
    int port_ = 0;
};

}  // namespace restarch::mock

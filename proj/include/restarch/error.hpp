#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace restarch {

/// Root of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Path and selector grammar.
class InvalidPath : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class AmbiguousShortcut : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

// Transport.
class NetworkError : public Error {
public:
    using Error::Error;
};

class MethodNotAllowed : public Error {
public:
    using Error::Error;
};

/// A non-success HTTP status surfaced as an error.
class HttpError : public Error {
public:
    HttpError(int status, const std::string& what) : Error(what), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

class AuthError : public HttpError {
public:
    explicit AuthError(const std::string& what) : HttpError(401, what) {}
};

class Forbidden : public HttpError {
public:
    explicit Forbidden(const std::string& what) : HttpError(403, what) {}
};

class NotFound : public HttpError {
public:
    explicit NotFound(const std::string& what) : HttpError(404, what) {}
};

class Conflict : public HttpError {
public:
    explicit Conflict(const std::string& what) : HttpError(409, what) {}
};

// Cache.
class OfflineMiss : public Error {
public:
    using Error::Error;
};

class CacheError : public Error {
public:
    using Error::Error;
};

// Search and introspection.
class CriteriaError : public Error {
public:
    using Error::Error;
};

class SearchError : public HttpError {
public:
    using HttpError::HttpError;
};

class MissingBinding : public Error {
public:
    explicit MissingBinding(std::vector<std::string> keys);
    const std::vector<std::string>& keys() const noexcept { return keys_; }

private:
    std::vector<std::string> keys_;
};

class UnknownDatatype : public Error {
public:
    using Error::Error;
};

class UnknownField : public Error {
public:
    using Error::Error;
};

class PortUnavailable : public Error {
public:
    using Error::Error;
};

}  // namespace restarch

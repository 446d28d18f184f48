#pragma once

#include <stdexcept>
#include <string>

namespace mnemo {

// Base for all library errors so callers can catch one type at the boundary.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A message line that does not match "[YYYY-MM-DD HH:MM:SS] <speaker>: <text>".
struct MalformedLineError : Error {
    explicit MalformedLineError(const std::string& msg) : Error(msg) {}
};

// Query text that analyzes to zero tokens.
struct EmptyQueryError : Error {
    explicit EmptyQueryError(const std::string& msg) : Error(msg) {}
};

// Truncating an embedding whose leading slice has (near-)zero norm.
struct DegenerateTruncationError : Error {
    explicit DegenerateTruncationError(const std::string& msg) : Error(msg) {}
};

// Vector with non-finite values or zero norm where a unit vector is required.
struct DegenerateVectorError : Error {
    explicit DegenerateVectorError(const std::string& msg) : Error(msg) {}
};

struct NotFoundError : Error {
    explicit NotFoundError(const std::string& msg) : Error(msg) {}
};

struct InvalidArgumentError : Error {
    explicit InvalidArgumentError(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Remote helper (embedder / extractor / reranker) could not produce a usable reply.
struct RemoteError : Error {
    RemoteError(std::string component, const std::string& msg)
        : Error(component + ": " + msg), component(std::move(component)) {}
    std::string component;
};

}  // namespace mnemo

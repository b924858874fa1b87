#pragma once

#include <stdexcept>
#include <string>

namespace lwf3d {

// Base class for all lwf3d failures. CLI exit codes: config-type errors
// (bad config file, unreadable input, missing embedding) map to 1,
// contract/protocol violations map to 2.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor/matrix dimension mismatch; message names both shapes.
class shape_error : public error {
public:
    using error::error;
};

// Malformed input file; carries the 1-based line number.
class parse_error : public error {
public:
    parse_error(const std::string& msg, std::size_t line)
        : error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Invalid configuration (file schema, CLI arguments, parameter ranges).
class config_error : public error {
public:
    using error::error;
};

// A precondition of an operation was violated.
class contract_error : public error {
public:
    using error::error;
};

// The incremental-learning protocol was violated (e.g. an old-class
// instance showed up in the stage-2 training stream).
class protocol_error : public error {
public:
    using error::error;
};

// A class in the experiment roster has no resolvable embedding.
class missing_embedding_error : public error {
public:
    using error::error;
};

// Degenerate geometry: empty cloud, all-identical points, zero-area mesh.
class degenerate_error : public error {
public:
    using error::error;
};

// Unknown class name for a fixed roster.
class roster_error : public error {
public:
    using error::error;
};

} // namespace lwf3d

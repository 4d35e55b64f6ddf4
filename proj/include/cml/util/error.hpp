#pragma once

#include <stdexcept>
#include <string>

namespace cml {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class GraphError : public Error {
public:
    using Error::Error;
};

/// Raised by edit-script parsing and application; `line()` is the 1-based
/// source line of the offending command (0 when unknown).
class EditError : public GraphError {
public:
    EditError(const std::string& what, int line)
        : GraphError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_ = 0;
};

class DiscoveryError : public Error {
public:
    using Error::Error;
};

class EstimationError : public Error {
public:
    using Error::Error;
};

class RefutationError : public Error {
public:
    using Error::Error;
};

class ScmError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Bad command-line usage (exit code 2).
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace cml

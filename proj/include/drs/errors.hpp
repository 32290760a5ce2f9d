#pragma once

#include <stdexcept>
#include <string>

namespace drs {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: malformed descriptors, out-of-range parameters,
// missing files, violated preconditions.  CLI exit code 2.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// A model or embedding backend failed: transport errors, exhausted
// retries, responses that never satisfied the expected shape.
// CLI exit code 3.
class ProviderError : public Error {
public:
    explicit ProviderError(const std::string& msg) : Error(msg) {}
};

// A model reply stayed structurally invalid after all repair attempts.
// Carries the raw text of the final reply for debugging.
class SchemaError : public ProviderError {
public:
    SchemaError(const std::string& msg, std::string raw)
        : ProviderError(msg), raw_text(std::move(raw)) {}

    std::string raw_text;
};

} // namespace drs

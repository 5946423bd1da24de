#pragma once

#include <stdexcept>
#include <string>

namespace manifex {

/// Bad parameter values, malformed configuration, domain violations.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem and serialization failures; message carries the path.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values where finite numbers are required.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace manifex

#pragma once

#include <stdexcept>
#include <string>

namespace arpsentinel {

// Invalid or inconsistent configuration: bad field values, disconnected
// topologies, unparseable config files.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent data: unparseable artifact files, dimension
// mismatches, violated operation preconditions.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// A broken internal invariant. Reaching this is a bug, not a user error.
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace arpsentinel

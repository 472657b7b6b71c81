#pragma once

#include <stdexcept>
#include <string>

namespace orbigw {

// Bad geometry configs, malformed cache files, inconsistent data.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A class name that does not exist in the target's basis.
struct unknown_class_error : std::runtime_error {
    explicit unknown_class_error(const std::string& msg) : std::runtime_error(msg) {}
};

// The solve strategy produced no equation isolating the requested key.
struct unsolvable_error : std::runtime_error {
    explicit unsolvable_error(const std::string& msg) : std::runtime_error(msg) {}
};

// The solver revisited a key mid-solve.
struct cycle_error : std::runtime_error {
    explicit cycle_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace orbigw

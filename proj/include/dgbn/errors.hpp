#pragma once

#include <stdexcept>
#include <string>

namespace dgbn {

// Base class for everything thrown by this library.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user-supplied configuration (priors, opsets, constraint flags).
struct config_error : error {
    explicit config_error(const std::string& msg) : error(msg) {}
};

// Malformed or inconsistent input data (CSV files, JSON documents, domains
// that do not match).
struct data_error : error {
    explicit data_error(const std::string& msg) : error(msg) {}
};

// A structural invariant that should hold by construction was violated.
struct invariant_error : error {
    explicit invariant_error(const std::string& msg) : error(msg) {}
};

}  // namespace dgbn

#pragma once

#include <stdexcept>
#include <string>

namespace qscat {

// Error taxonomy mirrored by the CLI exit codes:
//   input_error -> 2, budget_error -> 3, verification failures -> 1.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct scale_error : input_error {
    explicit scale_error(const std::string& msg) : input_error(msg) {}
};

// Pole at q^{1/D}=1 after reduction: the quantity has no classical limit.
struct regularity_error : std::runtime_error {
    explicit regularity_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Denominator vanishes at the requested root of unity.
struct pole_error : std::runtime_error {
    explicit pole_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Resampling caps, truncation limits, undecided stabilization certificates.
struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct truncation_error : budget_error {
    explicit truncation_error(const std::string& msg) : budget_error(msg) {}
};

// Non-generic data detected mid-computation (joint hit, boundary crossing, ...).
struct genericity_error : budget_error {
    explicit genericity_error(const std::string& msg) : budget_error(msg) {}
};

}  // namespace qscat

#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fadexp {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct OverflowError : std::overflow_error {
    using std::overflow_error::overflow_error;
};

// Raised when a series or quadrature fails to reach its target; carries the
// best estimate obtained so far.
struct NonConvergence : std::runtime_error {
    NonConvergence(const std::string& what, double partial, double err)
        : std::runtime_error(what), partial_value(partial), partial_error(err) {}
    double partial_value;
    double partial_error;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

using WarningHandler = std::function<void(std::string_view)>;

// Default handler prints "warning: ..." on stderr. Thread safe.
void set_warning_handler(WarningHandler h);
void warn(std::string_view msg);

}  // namespace fadexp

#pragma once

#include <stdexcept>
#include <string>

namespace uld {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a coupled pair fails to meet within the configured cap.
// Carries the terminal state gap so a broken coupling is diagnosable.
struct NonMeetingError : std::runtime_error {
    NonMeetingError(const std::string& msg, double gap_) : std::runtime_error(msg), gap(gap_) {}
    double gap;
};

} // namespace uld

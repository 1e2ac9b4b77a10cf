#pragma once

#include <stdexcept>
#include <string>

namespace mdens {

// Validation failures map to CLI exit status 2, IoError to 3.

/// Innovation or model specification that cannot be used (bad family/order/dof).
class InvalidSpec : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameter vector violating a model constraint (positivity, stationarity, invertibility).
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InsufficientData : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input with zero spread or otherwise unusable for a data-driven rule.
class DegenerateData : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Objective not finite at the optimizer's starting point.
class InvalidStart : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file content; the message names the line and field.
class DataFormatError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mdens

#pragma once

#include <stdexcept>
#include <string>

namespace pretouch {

/// Input file is syntactically broken (bad header, wrong point count, ...).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input file is well formed but uses a variant this library does not read.
class UnsupportedFormatError : public FormatError {
public:
    using FormatError::FormatError;
};

/// Point configuration does not determine a rigid transform.
class DegenerateConfiguration : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rejection sampling gave up before producing enough candidates.
class InfeasibleConstraints : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every candidate region produced an empty scan or a failed alignment.
class NoViableRegion : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration document has an unknown key or a value of the wrong type.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pretouch

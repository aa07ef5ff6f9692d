#pragma once

#include <stdexcept>
#include <string>

namespace complab {

/// 1 - F(u-) fell below the degenerate cap before the evaluation time.
class DegenerateLaw : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientPaths : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// mass_decomposition on a constant path.
class ZeroMass : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class BracketUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Azéma quantities evaluated at or past t = 1.
class HorizonViolation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed user configuration (bad JSON, unknown keys, invalid values).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace complab

#pragma once

#include <stdexcept>
#include <string>

namespace yomo {

// Error taxonomy shared by the library and the CLI. The CLI maps these to
// process exit codes: ConfigError/ArgumentError/IndexError -> 2,
// FormatError -> 3, DomainError -> 4.

// Invalid configuration (out-of-range sizes, incompatible settings).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid call argument (shape mismatch, empty input).
struct ArgumentError : std::invalid_argument {
    explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Qubit or element index out of range.
struct IndexError : std::out_of_range {
    explicit IndexError(const std::string& msg) : std::out_of_range(msg) {}
};

// Malformed file or serialized data.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Input outside the mathematical domain of a calculator.
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

}  // namespace yomo

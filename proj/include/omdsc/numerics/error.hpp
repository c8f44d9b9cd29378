#pragma once

#include <stdexcept>
#include <string>

namespace omdsc {

enum class ErrorKind {
    InvalidModulus,
    Domain,
    ModulusMismatch,
    Mode,
    NotScalable,
    TimeRegression,
    Protocol,
    Classification,
    Size,
    Parse,
    Unfinalized,
    Degenerate,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace omdsc

#pragma once

#include <stdexcept>
#include <string>

namespace limsim {

enum class ErrorCode {
    invalid_argument = 1,
    parse = 2,
    validation = 3,
    io = 4,
    numeric = 5,
    unknown_key = 6,
    internal = 7,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace limsim

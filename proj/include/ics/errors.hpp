#pragma once

#include <stdexcept>
#include <string>

namespace ics {

// Exit-code mapping used by the CLI: validation 1, numerical 2, I/O 3.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
    static constexpr int exit_code = 1;
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
    static constexpr int exit_code = 2;
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
    static constexpr int exit_code = 3;
};

}  // namespace ics

#pragma once

#include <stdexcept>
#include <string>

namespace neutro {

// Every failure raised by the library carries a short machine-readable code
// (for example "parse_error" or "shape_mismatch") next to the human message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

}  // namespace neutro

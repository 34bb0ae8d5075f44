#pragma once

#include <stdexcept>
#include <string>

namespace snls {

// Every failure carries a short machine-readable reason next to the message.
class Error : public std::runtime_error {
public:
    Error(std::string reason, const std::string& what)
        : std::runtime_error(what), reason_(std::move(reason)) {}

    const std::string& reason() const noexcept { return reason_; }

private:
    std::string reason_;
};

inline void require(bool ok, const char* reason, const std::string& what) {
    if (!ok) throw Error(reason, what);
}

}  // namespace snls

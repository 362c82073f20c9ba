#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sec {

/// Exception carrying a short machine-parsable category alongside the message.
/// The CLI prints failures as "error: <category>: <message>".
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

}  // namespace sec

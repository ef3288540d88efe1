#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace taustar {

/// Input is structurally valid but makes the requested statistic undefined
/// (constant margin, zero expected count, ...).
class degenerate_input_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A size guard tripped: the operation would exceed its intended cost envelope.
class resource_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Text input could not be parsed; carries the 1-based line number.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& message, std::size_t line)
        : std::runtime_error(message + " (line " + std::to_string(line) + ")"),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace taustar

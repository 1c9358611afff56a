#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace cassini {

/// Malformed or infeasible input: bad dimensions, unparsable files, empty domains.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A metric evaluated where it is undefined, e.g. a domain point sitting on a puncture.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what, std::optional<std::size_t> point = std::nullopt)
        : std::runtime_error(point ? what + " (point index " + std::to_string(*point) + ")" : what)
        , point_(point)
    {
    }

    std::optional<std::size_t> point() const noexcept { return point_; }

private:
    std::optional<std::size_t> point_;
};

} // namespace cassini

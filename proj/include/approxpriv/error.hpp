#pragma once

#include <stdexcept>
#include <string>

namespace approxpriv {

// Bad input: malformed tables, permutations, distributions, parameters.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A protocol tree that does not compute the table it is run against.
class ProtocolError : public std::runtime_error {
public:
    ProtocolError(std::size_t node, const std::string& what)
        : std::runtime_error("protocol node " + std::to_string(node) + ": " + what), node_(node)
    {}

    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

// Instance too large for a dense grid or an exhaustive search.
class LimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A guarantee the construction relies on was violated. Never caught internally.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace approxpriv

#pragma once

#include <stdexcept>
#include <string>

namespace afm {

/// Raised when a computation cannot deliver a trustworthy number: a matrix
/// that should be positive definite is not, a series fails to converge, and
/// so on. Precondition violations use std::invalid_argument / std::domain_error.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

class not_implemented_error : public std::logic_error {
public:
    explicit not_implemented_error(const std::string& what) : std::logic_error(what) {}
};

} // namespace afm

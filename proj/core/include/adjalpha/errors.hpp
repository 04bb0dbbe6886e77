#pragma once

#include <stdexcept>
#include <string>

namespace adjalpha {

// Parameter outside its documented domain.
class OutOfRange : public std::invalid_argument {
public:
    explicit OutOfRange(const std::string& what) : std::invalid_argument(what) {}
};

// Vector/matrix dimensions disagree.
class DimensionMismatch : public std::invalid_argument {
public:
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// Cholesky pivot at or below the rejection threshold.
class NotPositiveDefinite : public std::runtime_error {
public:
    explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solver failed to reach its tolerance.
class NoConvergence : public std::runtime_error {
public:
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace adjalpha

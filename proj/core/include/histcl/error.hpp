#pragma once

#include <stdexcept>
#include <string>

namespace histcl {

/// Malformed or inconsistent input data (bad CSV, datum outside grid, T > N, ...).
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure (singular matrix, negative probability, non-finite objective, ...).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace histcl

#pragma once

#include <stdexcept>
#include <string>

namespace freeprob {

/// Thrown when an iteration or numerical procedure fails to meet its
/// contract (stalled fixed point, mass defect, failed cone search, ...).
/// Invalid arguments and malformed inputs use std::invalid_argument /
/// std::domain_error instead.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace freeprob

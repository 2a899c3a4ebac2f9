#pragma once

#include <stdexcept>
#include <string>

namespace qnls {

// Bad arguments: wrong sizes, grids that do not match, out-of-range slots.
struct ContractError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Parameters outside the regime where an object is defined (alpha >= 1/2 for E3, rho >= 5/8, ...).
struct RegimeError : std::domain_error {
    using std::domain_error::domain_error;
};

// A sampled set is too coarse for the requested quadrature.
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integration produced NaN or exceeded the growth guard.
struct BlowUpError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw ContractError(what);
}

}  // namespace qnls

// common.hpp
// Shared error types and the numeric tolerance configuration used across btsim.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace btsim {

using cplx = std::complex<double>;

// Base class for all btsim errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad values, shapes, preconditions or schema violations. CLI exit code 2.
struct validation_error : error {
    using error::error;
};
struct size_error : validation_error {
    using validation_error::validation_error;
};
struct index_error : validation_error {
    using validation_error::validation_error;
};
struct shape_error : validation_error {
    using validation_error::validation_error;
};
struct parse_error : validation_error {
    using validation_error::validation_error;
};
// Circuit routed down a simulation path that cannot handle it.
struct unsupported_path_error : validation_error {
    using validation_error::validation_error;
};
// A channel marker that resolves to no registered channel.
struct integrity_error : validation_error {
    using validation_error::validation_error;
};

// Conditional quantity requested on an empty conditioning set. CLI exit code 3.
struct undefined_conditional_error : error {
    using error::error;
};

// Filesystem failures. CLI exit code 4.
struct io_error : error {
    using error::error;
};

// All numeric tolerances in one place.
struct Tolerances {
    double unitarity = 1e-12;          // per-entry |U†U - I|
    double norm = 1e-10;               // statevector norm deviation
    double hermiticity = 1e-10;        // per-entry |rho - rho†|
    double trace = 1e-10;              // |Tr(rho) - 1|
    double psd = 1e-8;                 // allowed negative eigenvalue magnitude
    double kraus_completeness = 1e-10; // per-entry |sum K†K - I|
    double imag_residue = 1e-10;       // allowed imaginary part of real expectations
    double prob_normalization = 1e-8;  // |sum p - 1| accepted before silent renormalize
    double prob_negative = 1e-10;      // most negative probability entry accepted
};

inline constexpr Tolerances tol{};

} // namespace btsim

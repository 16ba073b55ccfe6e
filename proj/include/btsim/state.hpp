// state.hpp
// Dense statevector and density-matrix simulation substrate.
//
// Bit ordering convention (fixed globally): qubit 0 is the most significant
// bit of an amplitude index and the leftmost character of every bitstring.

#pragma once

#include "btsim/common.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace btsim {

// Dense square complex matrix, row-major.
struct CMat {
    int dim = 0;
    std::vector<cplx> a;

    CMat() = default;
    explicit CMat(int d) : dim(d), a(static_cast<std::size_t>(d) * d) {}
    CMat(int d, std::vector<cplx> entries);

    cplx& at(int r, int c) { return a[static_cast<std::size_t>(r) * dim + c]; }
    const cplx& at(int r, int c) const { return a[static_cast<std::size_t>(r) * dim + c]; }

    static CMat identity(int d);
    CMat dagger() const;
    CMat operator*(const CMat& rhs) const;
    CMat scaled(cplx s) const;

    // Max absolute entry of (this - rhs).
    double max_abs_diff(const CMat& rhs) const;
};

// Unitary gate on 1 or 2 qubits. Unitarity is checked at construction.
struct GateMatrix {
    int arity = 1;
    CMat m;

    GateMatrix(int arity_, CMat entries);
};

enum class Pauli : std::uint8_t { I, X, Y, Z };

struct PauliString {
    int n_qubits = 0;
    std::vector<Pauli> letters;

    PauliString(int n, std::vector<Pauli> ls);
    // Parses e.g. "XIXZ".
    static PauliString parse(const std::string& text);
    // All given letters on `qubits`, identity elsewhere.
    static PauliString on_qubits(int n, Pauli letter, std::span<const int> qubits);
};

struct StateVector {
    int n_qubits = 0;
    std::vector<cplx> amplitudes;

    double norm_sq() const;
};

struct DensityMatrix {
    int n_qubits = 0;
    CMat entries;

    int dim() const { return entries.dim; }
    cplx trace() const;
    double max_hermiticity_violation() const;
    // PSD up to `eps`: checks that entries + eps*I admits a Cholesky factor.
    bool is_psd_within(double eps) const;
};

// |0...0> on n qubits, 1 <= n <= 16.
StateVector new_zero_state(int n_qubits);

// Applies `gate` embedded on `targets` (targets[0] is the most significant
// bit of the gate's own index space).
StateVector apply_gate(const StateVector& state, const GateMatrix& gate,
                       std::span<const int> targets);

DensityMatrix to_density(const StateVector& state);

// rho -> U rho U†.
DensityMatrix apply_unitary_dm(const DensityMatrix& dm, const GateMatrix& gate,
                               std::span<const int> targets);

// Outcome probabilities over all 2^n bitstrings.
std::vector<double> probabilities(const StateVector& state);
std::vector<double> probabilities(const DensityMatrix& dm);

// <psi|P|psi> or Tr(rho P); asserts the imaginary residue is negligible.
double expectation_pauli(const StateVector& state, const PauliString& pauli);
double expectation_pauli(const DensityMatrix& dm, const PauliString& pauli);

namespace detail {
// Shared embedding kernels; `matrix` need not be unitary.
void apply_matrix_inplace(std::vector<cplx>& amps, int n_qubits, const CMat& matrix,
                          std::span<const int> targets);
void check_targets(int n_qubits, int arity, std::span<const int> targets);
// rho -> M rho M†.
CMat conjugate_dm(const CMat& rho, int n_qubits, const CMat& matrix,
                  std::span<const int> targets);
} // namespace detail

} // namespace btsim

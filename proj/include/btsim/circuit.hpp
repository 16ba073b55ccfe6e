// circuit.hpp
// Gate-level IR, the canonical branch-transfer circuit constructor, basis
// rotations and circuit statistics.
//
// The canonical sequence on layout (Q, R, F1..Fk, P, A):
//   1. H(Q)                                   branch split
//   2. CX(Q -> R)                             reference encoding
//   3. X(P); CX(Q -> P)                       probe anti-correlated with Q
//   4. CX(Q -> A); CX^mu(A -> Fi) for each masked i; CX(Q -> A)
// The auxiliary qubit is uncomputed back to |0> and never measured.

#pragma once

#include "btsim/kraus.hpp"
#include "btsim/state.hpp"

#include <map>
#include <string>
#include <vector>

namespace btsim {

enum class OpKind { H, X, SDG, CX, CXPOW, CHANNEL };

struct CircuitOp {
    OpKind kind = OpKind::H;
    std::vector<int> targets;
    double param = 0.0;     // CXPOW transfer strength
    std::string channel_id; // CHANNEL only

    CircuitOp() = default;
    CircuitOp(OpKind k, std::vector<int> t, double p = 0.0)
        : kind(k), targets(std::move(t)), param(p) {}
};

struct Circuit {
    int n_qubits = 0;
    std::vector<CircuitOp> ops;
    std::vector<int> measured_qubits;
    std::map<std::string, KrausChannel> channels;

    // Canonical-sequence anchors (op indices), -1 when not applicable.
    int post_branch_split_anchor = -1;
    int post_transfer_anchor = -1;
    int rotation_start = -1; // first measurement-basis rotation op

    bool has_channel_markers() const;
};

struct RegisterLayout {
    int q = 0;
    int r = 1;
    std::vector<int> f; // friend register, length k
    int p = 0;
    int aux = 0;

    int n_qubits() const { return static_cast<int>(f.size()) + 4; }
    // (Q, R, F1..Fk, P): the coherence-witness qubits.
    std::vector<int> witness_qubits() const;
};

struct CircuitStats {
    int depth = 0;
    int two_qubit_count = 0;
    int total_gate_count = 0;
};

// Exact metric record shared by the ideal table and sweep points.
struct MetricSet {
    double v = 0.0;
    double w_x = 0.0;
    double w_y = 0.0;
    double c_mag = 0.0;
};

enum class MeasBasis { X, Y };

// Standard gate matrices.
GateMatrix gate_h();
GateMatrix gate_x();
GateMatrix gate_sdg();
GateMatrix gate_cx();
// Controlled-(X^mu) with X^mu = exp(i mu pi/2) Rx(mu pi); mu=1 is exactly CX.
GateMatrix gate_cx_pow(double mu);

// mask: one character per friend qubit, '1' = included in the transfer.
// Empty/omitted mask means all-ones.
std::pair<Circuit, RegisterLayout> build_branch_transfer(int k, double mu,
                                                         const std::string& mask = "");

// basis X appends H on each listed qubit; basis Y appends SDG then H.
// measured_qubits is set to `qubits` (cleared when the list is empty).
Circuit append_basis_rotation(const Circuit& circuit, MeasBasis basis,
                              const std::vector<int>& qubits);

// Copy with measured_qubits replaced (Z-basis measurement selection).
Circuit with_measured(const Circuit& circuit, const std::vector<int>& qubits);

// Sequential unitary evolution from |0...0>; rejects channel markers.
StateVector run_statevector(const Circuit& circuit);

// Depth on the qubit-dependency DAG; counts exclude channel markers.
CircuitStats circuit_stats(const Circuit& circuit);

// Exact {V, W_X, W_Y, C_mag} of the canonical circuit, no sampling.
MetricSet ideal_witness_table(int k, double mu);

} // namespace btsim

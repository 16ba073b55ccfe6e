#include "btsim/circuit.hpp"

#include "btsim/metrics.hpp"
#include "btsim/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace btsim {

bool Circuit::has_channel_markers() const {
    return std::any_of(ops.begin(), ops.end(),
                       [](const CircuitOp& op) { return op.kind == OpKind::CHANNEL; });
}

std::vector<int> RegisterLayout::witness_qubits() const {
    std::vector<int> qs;
    qs.reserve(f.size() + 3);
    qs.push_back(q);
    qs.push_back(r);
    qs.insert(qs.end(), f.begin(), f.end());
    qs.push_back(p);
    return qs;
}

GateMatrix gate_h() {
    const double s = 1.0 / std::numbers::sqrt2;
    return GateMatrix(1, CMat(2, {s, s, s, -s}));
}

GateMatrix gate_x() { return GateMatrix(1, CMat(2, {0, 1, 1, 0})); }

GateMatrix gate_sdg() { return GateMatrix(1, CMat(2, {1, 0, 0, {0, -1}})); }

GateMatrix gate_cx() {
    CMat m = CMat::identity(4);
    m.at(2, 2) = 0;
    m.at(3, 3) = 0;
    m.at(2, 3) = 1;
    m.at(3, 2) = 1;
    return GateMatrix(2, std::move(m));
}

GateMatrix gate_cx_pow(double mu) {
    // X^mu = exp(i mu pi/2) Rx(mu pi): identity at mu=0, exactly X at mu=1.
    const double half = mu * std::numbers::pi / 2.0;
    const cplx ph = std::polar(1.0, half);
    const cplx a = ph * std::cos(half);
    const cplx b = ph * cplx{0.0, -1.0} * std::sin(half);
    CMat m = CMat::identity(4);
    m.at(2, 2) = a;
    m.at(2, 3) = b;
    m.at(3, 2) = b;
    m.at(3, 3) = a;
    return GateMatrix(2, std::move(m));
}

namespace {

GateMatrix gate_for(const CircuitOp& op) {
    switch (op.kind) {
    case OpKind::H: return gate_h();
    case OpKind::X: return gate_x();
    case OpKind::SDG: return gate_sdg();
    case OpKind::CX: return gate_cx();
    case OpKind::CXPOW: return gate_cx_pow(op.param);
    case OpKind::CHANNEL: break;
    }
    throw validation_error("gate_for: op has no unitary matrix");
}

} // namespace

std::pair<Circuit, RegisterLayout> build_branch_transfer(int k, double mu,
                                                         const std::string& mask) {
    if (k < 1) throw validation_error("build_branch_transfer: k must be >= 1");
    if (k > 12) throw size_error("build_branch_transfer: k must be <= 12");
    if (!(mu >= 0.0 && mu <= 1.0))
        throw validation_error("build_branch_transfer: mu must be in [0, 1]");
    std::string m = mask.empty() ? std::string(static_cast<std::size_t>(k), '1') : mask;
    if (static_cast<int>(m.size()) != k)
        throw validation_error("build_branch_transfer: mask length does not match k");
    if (m.find_first_not_of("01") != std::string::npos)
        throw validation_error("build_branch_transfer: mask must contain only 0/1");
    if (m.find('1') == std::string::npos)
        throw validation_error("build_branch_transfer: mask has no set bit");

    RegisterLayout layout;
    layout.q = 0;
    layout.r = 1;
    layout.f.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) layout.f[static_cast<std::size_t>(i)] = 2 + i;
    layout.p = k + 2;
    layout.aux = k + 3;

    Circuit c;
    c.n_qubits = layout.n_qubits();
    c.ops.push_back({OpKind::H, {layout.q}});
    c.post_branch_split_anchor = 1;
    c.ops.push_back({OpKind::CX, {layout.q, layout.r}});
    c.ops.push_back({OpKind::X, {layout.p}});
    c.ops.push_back({OpKind::CX, {layout.q, layout.p}});
    c.ops.push_back({OpKind::CX, {layout.q, layout.aux}});
    for (int i = 0; i < k; ++i)
        if (m[static_cast<std::size_t>(i)] == '1')
            c.ops.push_back({OpKind::CXPOW, {layout.aux, layout.f[static_cast<std::size_t>(i)]}, mu});
    c.ops.push_back({OpKind::CX, {layout.q, layout.aux}});
    c.post_transfer_anchor = static_cast<int>(c.ops.size());
    return {std::move(c), std::move(layout)};
}

Circuit append_basis_rotation(const Circuit& circuit, MeasBasis basis,
                              const std::vector<int>& qubits) {
    Circuit out = circuit;
    out.measured_qubits = qubits;
    if (qubits.empty()) return out;
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        if (qubits[i] < 0 || qubits[i] >= circuit.n_qubits)
            throw index_error("append_basis_rotation: qubit " + std::to_string(qubits[i]) +
                              " out of range");
        for (std::size_t j = i + 1; j < qubits.size(); ++j)
            if (qubits[i] == qubits[j])
                throw index_error("append_basis_rotation: duplicate qubit " +
                                  std::to_string(qubits[i]));
    }
    if (out.rotation_start < 0) out.rotation_start = static_cast<int>(out.ops.size());
    for (int q : qubits) {
        if (basis == MeasBasis::Y) out.ops.push_back({OpKind::SDG, {q}});
        out.ops.push_back({OpKind::H, {q}});
    }
    return out;
}

Circuit with_measured(const Circuit& circuit, const std::vector<int>& qubits) {
    for (int q : qubits)
        if (q < 0 || q >= circuit.n_qubits)
            throw index_error("with_measured: qubit " + std::to_string(q) + " out of range");
    Circuit out = circuit;
    out.measured_qubits = qubits;
    return out;
}

StateVector run_statevector(const Circuit& circuit) {
    if (circuit.has_channel_markers())
        throw unsupported_path_error(
            "run_statevector: circuit contains channel markers; use the density-matrix path");
    StateVector state = new_zero_state(circuit.n_qubits);
    for (const auto& op : circuit.ops) {
        const GateMatrix g = gate_for(op);
        state = apply_gate(state, g, op.targets);
    }
    return state;
}

CircuitStats circuit_stats(const Circuit& circuit) {
    CircuitStats stats;
    std::vector<int> qubit_depth(static_cast<std::size_t>(circuit.n_qubits), 0);
    for (const auto& op : circuit.ops) {
        if (op.kind == OpKind::CHANNEL) continue;
        ++stats.total_gate_count;
        if (op.targets.size() == 2) ++stats.two_qubit_count;
        int d = 0;
        for (int t : op.targets) d = std::max(d, qubit_depth[static_cast<std::size_t>(t)]);
        ++d;
        for (int t : op.targets) qubit_depth[static_cast<std::size_t>(t)] = d;
        stats.depth = std::max(stats.depth, d);
    }
    return stats;
}

MetricSet ideal_witness_table(int k, double mu) {
    const auto [circuit, layout] = build_branch_transfer(k, mu);
    const StateVector sv = run_statevector(circuit);
    const std::vector<int> wq = layout.witness_qubits();
    MetricSet m;
    m.w_x = expectation_pauli(sv, PauliString::on_qubits(circuit.n_qubits, Pauli::X, wq));
    m.w_y = expectation_pauli(sv, PauliString::on_qubits(circuit.n_qubits, Pauli::Y, wq));
    const auto rp = marginalize_probs(probabilities(sv), circuit.n_qubits, {layout.r, layout.p});
    m.v = exact_visibility(rp);
    m.c_mag = std::hypot(m.w_x, m.w_y);
    return m;
}

} // namespace btsim

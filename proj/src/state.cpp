#include "btsim/state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace btsim {

CMat::CMat(int d, std::vector<cplx> entries) : dim(d), a(std::move(entries)) {
    if (a.size() != static_cast<std::size_t>(d) * d)
        throw shape_error("CMat: entry count does not match dimension");
}

CMat CMat::identity(int d) {
    CMat m(d);
    for (int i = 0; i < d; ++i) m.at(i, i) = 1.0;
    return m;
}

CMat CMat::dagger() const {
    CMat r(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) r.at(i, j) = std::conj(at(j, i));
    return r;
}

CMat CMat::operator*(const CMat& rhs) const {
    if (dim != rhs.dim) throw shape_error("CMat: dimension mismatch in product");
    CMat r(dim);
    for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) {
            const cplx v = at(i, k);
            if (v == cplx{}) continue;
            for (int j = 0; j < dim; ++j) r.at(i, j) += v * rhs.at(k, j);
        }
    return r;
}

CMat CMat::scaled(cplx s) const {
    CMat r = *this;
    for (auto& v : r.a) v *= s;
    return r;
}

double CMat::max_abs_diff(const CMat& rhs) const {
    if (dim != rhs.dim) throw shape_error("CMat: dimension mismatch in comparison");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - rhs.a[i]));
    return worst;
}

GateMatrix::GateMatrix(int arity_, CMat entries) : arity(arity_), m(std::move(entries)) {
    if (arity != 1 && arity != 2) throw validation_error("GateMatrix: arity must be 1 or 2");
    if (m.dim != (1 << arity)) throw shape_error("GateMatrix: matrix dimension does not match arity");
    const double dev = (m.dagger() * m).max_abs_diff(CMat::identity(m.dim));
    if (dev > tol.unitarity)
        throw validation_error("GateMatrix: matrix is not unitary (deviation " +
                               std::to_string(dev) + ")");
}

PauliString::PauliString(int n, std::vector<Pauli> ls) : n_qubits(n), letters(std::move(ls)) {
    if (static_cast<int>(letters.size()) != n_qubits)
        throw shape_error("PauliString: letter count does not match qubit count");
}

PauliString PauliString::parse(const std::string& text) {
    std::vector<Pauli> ls;
    ls.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case 'I': ls.push_back(Pauli::I); break;
        case 'X': ls.push_back(Pauli::X); break;
        case 'Y': ls.push_back(Pauli::Y); break;
        case 'Z': ls.push_back(Pauli::Z); break;
        default: throw parse_error(std::string("PauliString: unknown letter '") + c + "'");
        }
    }
    return PauliString(static_cast<int>(text.size()), std::move(ls));
}

PauliString PauliString::on_qubits(int n, Pauli letter, std::span<const int> qubits) {
    std::vector<Pauli> ls(static_cast<std::size_t>(n), Pauli::I);
    for (int q : qubits) {
        if (q < 0 || q >= n) throw index_error("PauliString: qubit index out of range");
        ls[static_cast<std::size_t>(q)] = letter;
    }
    return PauliString(n, std::move(ls));
}

double StateVector::norm_sq() const {
    double s = 0.0;
    for (const auto& amp : amplitudes) s += std::norm(amp);
    return s;
}

cplx DensityMatrix::trace() const {
    cplx t{};
    for (int i = 0; i < dim(); ++i) t += entries.at(i, i);
    return t;
}

double DensityMatrix::max_hermiticity_violation() const {
    double worst = 0.0;
    for (int i = 0; i < dim(); ++i)
        for (int j = i; j < dim(); ++j)
            worst = std::max(worst, std::abs(entries.at(i, j) - std::conj(entries.at(j, i))));
    return worst;
}

bool DensityMatrix::is_psd_within(double eps) const {
    // Cholesky of rho + eps*I; a pivot failure means an eigenvalue below -eps.
    CMat m = entries;
    const int d = m.dim;
    for (int i = 0; i < d; ++i) m.at(i, i) += eps;
    for (int j = 0; j < d; ++j) {
        double diag = m.at(j, j).real();
        for (int k = 0; k < j; ++k) diag -= std::norm(m.at(j, k));
        if (diag < -eps) return false;
        const double root = std::sqrt(std::max(diag, 0.0));
        m.at(j, j) = root;
        for (int i = j + 1; i < d; ++i) {
            cplx v = m.at(i, j);
            for (int k = 0; k < j; ++k) v -= m.at(i, k) * std::conj(m.at(j, k));
            m.at(i, j) = root > 0 ? v / root : cplx{};
        }
    }
    return true;
}

StateVector new_zero_state(int n_qubits) {
    if (n_qubits < 1 || n_qubits > 16)
        throw size_error("new_zero_state: n_qubits must be in [1, 16], got " +
                         std::to_string(n_qubits));
    StateVector s;
    s.n_qubits = n_qubits;
    s.amplitudes.assign(std::size_t{1} << n_qubits, cplx{});
    s.amplitudes[0] = 1.0;
    return s;
}

namespace detail {

void check_targets(int n_qubits, int arity, std::span<const int> targets) {
    if (static_cast<int>(targets.size()) != arity)
        throw shape_error("apply_gate: target count does not match gate arity");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] < 0 || targets[i] >= n_qubits)
            throw index_error("apply_gate: target qubit " + std::to_string(targets[i]) +
                              " out of range");
        for (std::size_t j = i + 1; j < targets.size(); ++j)
            if (targets[i] == targets[j])
                throw index_error("apply_gate: duplicate target qubit " +
                                  std::to_string(targets[i]));
    }
}

void apply_matrix_inplace(std::vector<cplx>& amps, int n_qubits, const CMat& matrix,
                          std::span<const int> targets) {
    const int arity = static_cast<int>(targets.size());
    const int block = 1 << arity;
    // Bit of qubit q within an amplitude index (qubit 0 is the MSB).
    std::vector<std::size_t> bit(targets.size());
    std::size_t targets_mask = 0;
    for (int t = 0; t < arity; ++t) {
        bit[static_cast<std::size_t>(t)] = std::size_t{1} << (n_qubits - 1 - targets[t]);
        targets_mask |= bit[static_cast<std::size_t>(t)];
    }

    std::vector<cplx> in(static_cast<std::size_t>(block));
    const std::size_t dim = amps.size();
    for (std::size_t base = 0; base < dim; ++base) {
        if (base & targets_mask) continue; // visit each block once, via its all-zeros member
        for (int g = 0; g < block; ++g) {
            std::size_t idx = base;
            for (int t = 0; t < arity; ++t)
                if (g & (1 << (arity - 1 - t))) idx |= bit[static_cast<std::size_t>(t)];
            in[static_cast<std::size_t>(g)] = amps[idx];
        }
        for (int r = 0; r < block; ++r) {
            cplx acc{};
            for (int c = 0; c < block; ++c) acc += matrix.at(r, c) * in[static_cast<std::size_t>(c)];
            std::size_t idx = base;
            for (int t = 0; t < arity; ++t)
                if (r & (1 << (arity - 1 - t))) idx |= bit[static_cast<std::size_t>(t)];
            amps[idx] = acc;
        }
    }
}

CMat conjugate_dm(const CMat& rho, int n_qubits, const CMat& matrix,
                  std::span<const int> targets) {
    const int d = rho.dim;
    CMat out = rho;
    // M rho: apply M down each column (row index transforms).
    std::vector<cplx> col(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c) {
        for (int r = 0; r < d; ++r) col[static_cast<std::size_t>(r)] = out.at(r, c);
        apply_matrix_inplace(col, n_qubits, matrix, targets);
        for (int r = 0; r < d; ++r) out.at(r, c) = col[static_cast<std::size_t>(r)];
    }
    // (M rho) M†: apply conj(M) along each row (column index transforms).
    CMat conj_m(matrix.dim);
    for (std::size_t i = 0; i < matrix.a.size(); ++i) conj_m.a[i] = std::conj(matrix.a[i]);
    std::vector<cplx> row(static_cast<std::size_t>(d));
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) row[static_cast<std::size_t>(c)] = out.at(r, c);
        apply_matrix_inplace(row, n_qubits, conj_m, targets);
        for (int c = 0; c < d; ++c) out.at(r, c) = row[static_cast<std::size_t>(c)];
    }
    return out;
}

} // namespace detail

StateVector apply_gate(const StateVector& state, const GateMatrix& gate,
                       std::span<const int> targets) {
    detail::check_targets(state.n_qubits, gate.arity, targets);
    StateVector out = state;
    detail::apply_matrix_inplace(out.amplitudes, out.n_qubits, gate.m, targets);
    return out;
}

DensityMatrix to_density(const StateVector& state) {
    if (state.n_qubits > 10)
        throw size_error("to_density: density-matrix path limited to 10 qubits");
    const std::size_t d = state.amplitudes.size();
    DensityMatrix rho;
    rho.n_qubits = state.n_qubits;
    rho.entries = CMat(static_cast<int>(d));
    for (std::size_t i = 0; i < d; ++i) {
        if (state.amplitudes[i] == cplx{}) continue;
        for (std::size_t j = 0; j < d; ++j)
            rho.entries.a[i * d + j] = state.amplitudes[i] * std::conj(state.amplitudes[j]);
    }
    return rho;
}

DensityMatrix apply_unitary_dm(const DensityMatrix& dm, const GateMatrix& gate,
                               std::span<const int> targets) {
    detail::check_targets(dm.n_qubits, gate.arity, targets);
    DensityMatrix out;
    out.n_qubits = dm.n_qubits;
    out.entries = detail::conjugate_dm(dm.entries, dm.n_qubits, gate.m, targets);
    return out;
}

std::vector<double> probabilities(const StateVector& state) {
    std::vector<double> p(state.amplitudes.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(state.amplitudes[i]);
    return p;
}

std::vector<double> probabilities(const DensityMatrix& dm) {
    std::vector<double> p(static_cast<std::size_t>(dm.dim()));
    for (int i = 0; i < dm.dim(); ++i) p[static_cast<std::size_t>(i)] = dm.entries.at(i, i).real();
    return p;
}

namespace {

// P|i> = phase(i) |i ^ flip_mask>.
struct PauliAction {
    std::size_t flip_mask = 0;
    std::vector<Pauli> letters;
    int n = 0;

    cplx phase(std::size_t i) const {
        cplx ph{1.0, 0.0};
        for (int q = 0; q < n; ++q) {
            const bool b = (i >> (n - 1 - q)) & 1u;
            switch (letters[static_cast<std::size_t>(q)]) {
            case Pauli::I:
            case Pauli::X: break;
            case Pauli::Y: ph *= b ? cplx{0.0, -1.0} : cplx{0.0, 1.0}; break;
            case Pauli::Z:
                if (b) ph = -ph;
                break;
            }
        }
        return ph;
    }
};

PauliAction make_action(int n_qubits, const PauliString& pauli) {
    PauliAction act;
    act.n = n_qubits;
    act.letters = pauli.letters;
    for (int q = 0; q < n_qubits; ++q) {
        const Pauli l = pauli.letters[static_cast<std::size_t>(q)];
        if (l == Pauli::X || l == Pauli::Y) act.flip_mask |= std::size_t{1} << (n_qubits - 1 - q);
    }
    return act;
}

double check_real(cplx value, const char* what) {
    if (std::abs(value.imag()) >= tol.imag_residue)
        throw validation_error(std::string(what) + ": imaginary residue exceeds tolerance");
    return value.real();
}

} // namespace

double expectation_pauli(const StateVector& state, const PauliString& pauli) {
    if (pauli.n_qubits != state.n_qubits)
        throw shape_error("expectation_pauli: Pauli string length does not match state");
    const PauliAction act = make_action(state.n_qubits, pauli);
    cplx acc{};
    for (std::size_t i = 0; i < state.amplitudes.size(); ++i) {
        const cplx a = state.amplitudes[i];
        if (a == cplx{}) continue;
        acc += std::conj(state.amplitudes[i ^ act.flip_mask]) * act.phase(i) * a;
    }
    return check_real(acc, "expectation_pauli");
}

double expectation_pauli(const DensityMatrix& dm, const PauliString& pauli) {
    if (pauli.n_qubits != dm.n_qubits)
        throw shape_error("expectation_pauli: Pauli string length does not match state");
    const PauliAction act = make_action(dm.n_qubits, pauli);
    const std::size_t d = static_cast<std::size_t>(dm.dim());
    cplx acc{};
    // Tr(rho P) = sum_i rho[i, i^m] * phase(i).
    for (std::size_t i = 0; i < d; ++i)
        acc += dm.entries.a[i * d + (i ^ act.flip_mask)] * act.phase(i);
    return check_real(acc, "expectation_pauli");
}

} // namespace btsim

#include "btsim/kraus.hpp"

#include <cmath>
#include <string>

namespace btsim {

namespace {

CMat pauli_matrix(Pauli p) {
    CMat m(2);
    switch (p) {
    case Pauli::I: m.at(0, 0) = 1.0; m.at(1, 1) = 1.0; break;
    case Pauli::X: m.at(0, 1) = 1.0; m.at(1, 0) = 1.0; break;
    case Pauli::Y: m.at(0, 1) = {0.0, -1.0}; m.at(1, 0) = {0.0, 1.0}; break;
    case Pauli::Z: m.at(0, 0) = 1.0; m.at(1, 1) = -1.0; break;
    }
    return m;
}

CMat kron(const CMat& a, const CMat& b) {
    CMat r(a.dim * b.dim);
    for (int i = 0; i < a.dim; ++i)
        for (int j = 0; j < a.dim; ++j)
            for (int k = 0; k < b.dim; ++k)
                for (int l = 0; l < b.dim; ++l)
                    r.at(i * b.dim + k, j * b.dim + l) = a.at(i, j) * b.at(k, l);
    return r;
}

} // namespace

KrausChannel::KrausChannel(int arity_, std::vector<CMat> ops)
    : arity(arity_), kraus_ops(std::move(ops)) {
    if (arity != 1 && arity != 2) throw validation_error("KrausChannel: arity must be 1 or 2");
    if (kraus_ops.empty()) throw validation_error("KrausChannel: no Kraus operators");
    const int d = 1 << arity;
    for (const auto& k : kraus_ops)
        if (k.dim != d) throw shape_error("KrausChannel: operator dimension does not match arity");
    const double dev = completeness_deviation();
    if (dev > tol.kraus_completeness)
        throw validation_error("KrausChannel: completeness violated (deviation " +
                               std::to_string(dev) + ")");
}

double KrausChannel::completeness_deviation() const {
    const int d = 1 << arity;
    CMat sum(d);
    for (const auto& k : kraus_ops) {
        const CMat kk = k.dagger() * k;
        for (std::size_t i = 0; i < sum.a.size(); ++i) sum.a[i] += kk.a[i];
    }
    return sum.max_abs_diff(CMat::identity(d));
}

KrausChannel phase_flip(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw validation_error("phase_flip: lambda must be in [0, 1]");
    std::vector<CMat> ops;
    ops.push_back(pauli_matrix(Pauli::I).scaled(std::sqrt(1.0 - lambda)));
    ops.push_back(pauli_matrix(Pauli::Z).scaled(std::sqrt(lambda)));
    return KrausChannel(1, std::move(ops));
}

KrausChannel depolarizing(double p, int arity) {
    if (!(p >= 0.0 && p <= 1.0)) throw validation_error("depolarizing: p must be in [0, 1]");
    if (arity != 1 && arity != 2) throw validation_error("depolarizing: arity must be 1 or 2");
    const int n_paulis = arity == 1 ? 4 : 16;
    const double w = std::sqrt(p / (n_paulis - 1));
    std::vector<CMat> ops;
    ops.push_back(CMat::identity(1 << arity).scaled(std::sqrt(1.0 - p)));
    static constexpr Pauli kLetters[4] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
    if (w > 0.0) {
        for (int code = 1; code < n_paulis; ++code) {
            CMat m = pauli_matrix(kLetters[arity == 1 ? code : code / 4]);
            if (arity == 2) m = kron(m, pauli_matrix(kLetters[code % 4]));
            ops.push_back(m.scaled(w));
        }
    }
    return KrausChannel(arity, std::move(ops));
}

DensityMatrix apply_channel(const DensityMatrix& dm, const KrausChannel& ch,
                            std::span<const int> targets) {
    detail::check_targets(dm.n_qubits, ch.arity, targets);
    DensityMatrix out;
    out.n_qubits = dm.n_qubits;
    out.entries = CMat(dm.dim());
    for (const auto& k : ch.kraus_ops) {
        const CMat term = detail::conjugate_dm(dm.entries, dm.n_qubits, k, targets);
        for (std::size_t i = 0; i < out.entries.a.size(); ++i) out.entries.a[i] += term.a[i];
    }
    return out;
}

} // namespace btsim

// kraus.hpp
// Kraus-operator channels and their application to density matrices.

#pragma once

#include "btsim/state.hpp"

#include <vector>

namespace btsim {

// A completely positive trace-preserving map given by its Kraus operators.
// Completeness (sum K†K = I) is checked at construction.
struct KrausChannel {
    int arity = 1;
    std::vector<CMat> kraus_ops;

    KrausChannel(int arity_, std::vector<CMat> ops);

    double completeness_deviation() const;
};

// Phase-flip (dephasing) channel: rho -> (1-lambda) rho + lambda Z rho Z.
KrausChannel phase_flip(double lambda);

// Depolarizing channel: rho -> (1-p) rho + p * uniform mixture of the
// 4^arity - 1 non-identity Pauli conjugations.
KrausChannel depolarizing(double p, int arity);

// rho -> sum_K K rho K†.
DensityMatrix apply_channel(const DensityMatrix& dm, const KrausChannel& ch,
                            std::span<const int> targets);

} // namespace btsim

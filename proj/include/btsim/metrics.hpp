// metrics.hpp
// Estimation of the visibility V, parity witnesses W_X / W_Y and the
// coherence magnitude C_mag, with shot-noise standard errors.

#pragma once

#include "btsim/sampling.hpp"

#include <cstdint>
#include <vector>

namespace btsim {

enum class MetricKind { V, W_X, W_Y, C_MAG };

const char* metric_name(MetricKind kind);

struct WitnessResult {
    double value = 0.0;
    double error = 0.0; // one standard error
    std::int64_t shots_used = 0;
    MetricKind kind = MetricKind::V;
};

enum class RunMode { COHERENCE_X, COHERENCE_Y, RP_Z };

// (N_even - N_odd) / N over all measured bits, with the plug-in binomial
// standard error sqrt((1 - value^2) / N).
WitnessResult parity_witness(const Counts& counts);

// V = |P(R=0 | P=1) - P(R=1 | P=1)| on counts with bit_order exactly (R, P).
// Error is the conditional-binomial formula 2 sqrt(p (1-p) / N1) on the P=1
// subsample.  Throws undefined_conditional_error when no shot has P=1.
WitnessResult visibility(const Counts& counts);

// C_mag = sqrt(W_X^2 + W_Y^2) with first-order error propagation.
WitnessResult coherence_magnitude(const WitnessResult& wx, const WitnessResult& wy);

// Dispatches on mode to parity_witness (coherence) or visibility (rp_z).
WitnessResult metrics_from_run(RunMode mode, const Counts& counts);

// shots -> infinity limits computed from exact probabilities.
double exact_parity(const std::vector<double>& probs);
double exact_visibility(const std::vector<double>& probs_rp);

} // namespace btsim

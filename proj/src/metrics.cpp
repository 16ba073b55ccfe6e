#include "btsim/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace btsim {

const char* metric_name(MetricKind kind) {
    switch (kind) {
    case MetricKind::V: return "v";
    case MetricKind::W_X: return "w_x";
    case MetricKind::W_Y: return "w_y";
    case MetricKind::C_MAG: return "c_mag";
    }
    return "?";
}

namespace {

bool key_parity_odd(const std::string& key) {
    return std::count(key.begin(), key.end(), '1') % 2 != 0;
}

} // namespace

WitnessResult parity_witness(const Counts& counts) {
    if (counts.total_shots < 1) throw validation_error("parity_witness: zero shots");
    std::int64_t even = 0;
    std::int64_t odd = 0;
    for (const auto& [key, n] : counts.table) (key_parity_odd(key) ? odd : even) += n;
    const double n_total = static_cast<double>(even + odd);
    WitnessResult res;
    res.value = static_cast<double>(even - odd) / n_total;
    res.error = std::sqrt(std::max(1.0 - res.value * res.value, 0.0) / n_total);
    res.shots_used = counts.total_shots;
    res.kind = MetricKind::W_X;
    return res;
}

WitnessResult visibility(const Counts& counts) {
    if (counts.total_shots < 1) throw validation_error("visibility: zero shots");
    if (counts.bit_order.size() != 2)
        throw shape_error("visibility: counts must be over exactly (R, P)");
    std::int64_t n1 = 0;     // shots with P = 1
    std::int64_t n_r0p1 = 0; // shots with R = 0, P = 1
    for (const auto& [key, n] : counts.table) {
        if (key.size() != 2) throw shape_error("visibility: malformed counts key '" + key + "'");
        if (key[1] != '1') continue;
        n1 += n;
        if (key[0] == '0') n_r0p1 += n;
    }
    if (n1 == 0)
        throw undefined_conditional_error("visibility: no shots with P=1, conditional undefined");
    const double p = static_cast<double>(n_r0p1) / static_cast<double>(n1);
    WitnessResult res;
    res.value = std::abs(2.0 * p - 1.0);
    res.error = 2.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n1));
    res.shots_used = counts.total_shots;
    res.kind = MetricKind::V;
    return res;
}

WitnessResult coherence_magnitude(const WitnessResult& wx, const WitnessResult& wy) {
    WitnessResult res;
    res.value = std::hypot(wx.value, wy.value);
    if (res.value > 0.0) {
        res.error = std::sqrt(wx.value * wx.value * wx.error * wx.error +
                              wy.value * wy.value * wy.error * wy.error) /
                    res.value;
    } else {
        res.error = std::hypot(wx.error, wy.error);
    }
    res.shots_used = std::min(wx.shots_used, wy.shots_used);
    res.kind = MetricKind::C_MAG;
    return res;
}

WitnessResult metrics_from_run(RunMode mode, const Counts& counts) {
    switch (mode) {
    case RunMode::COHERENCE_X:
    case RunMode::COHERENCE_Y: {
        if (counts.bit_order.size() < 4)
            throw validation_error("metrics_from_run: coherence mode needs >= 4 measured bits");
        WitnessResult res = parity_witness(counts);
        res.kind = mode == RunMode::COHERENCE_X ? MetricKind::W_X : MetricKind::W_Y;
        return res;
    }
    case RunMode::RP_Z: {
        if (counts.bit_order.size() != 2)
            throw validation_error("metrics_from_run: rp_z mode needs exactly 2 measured bits");
        return visibility(counts);
    }
    }
    throw validation_error("metrics_from_run: unknown mode");
}

double exact_parity(const std::vector<double>& probs) {
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i)
        acc += (std::popcount(i) % 2 == 0) ? probs[i] : -probs[i];
    return acc;
}

double exact_visibility(const std::vector<double>& probs_rp) {
    if (probs_rp.size() != 4)
        throw shape_error("exact_visibility: expected a 2-bit (R, P) distribution");
    // Index bits are (R, P): P=1 lives at indices 01 and 11.
    const double p01 = probs_rp[1];
    const double p11 = probs_rp[3];
    const double p1 = p01 + p11;
    if (p1 <= 1e-15)
        throw undefined_conditional_error("exact_visibility: P=1 has zero probability");
    return std::abs(p01 - p11) / p1;
}

} // namespace btsim

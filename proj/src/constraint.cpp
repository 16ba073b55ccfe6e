#include "btsim/constraint.hpp"

#include "btsim/metrics.hpp"
#include "btsim/sampling.hpp"

#include <cmath>
#include <limits>

namespace btsim {

const char* channel_family_name(ChannelFamily family) {
    switch (family) {
    case ChannelFamily::PHASE_FLIP: return "phase-flip";
    }
    return "?";
}

namespace {

KrausChannel make_channel(ChannelFamily family, double lambda) {
    switch (family) {
    case ChannelFamily::PHASE_FLIP: return phase_flip(lambda);
    }
    throw validation_error("unknown channel family");
}

std::vector<double> measured_probs(const Circuit& circuit, const std::vector<int>& measured,
                                   const std::optional<NoiseSpec>& noise) {
    const DensityMatrix rho = run_density(circuit, noise);
    std::vector<double> probs = marginalize_probs(probabilities(rho), circuit.n_qubits, measured);
    if (noise) probs = apply_readout_confusion(probs, noise->readout, measured);
    return probs;
}

} // namespace

MetricSet exact_metrics_with_channel(int k, double mu, ChannelFamily family, double lambda,
                                     const InsertionPoint& at,
                                     const std::optional<NoiseSpec>& noise) {
    const auto [base, layout] = build_branch_transfer(k, mu);
    const std::vector<int> wq = layout.witness_qubits();
    const KrausChannel ch = make_channel(family, lambda);

    MetricSet m;
    {
        const Circuit cx = insert_channel(append_basis_rotation(base, MeasBasis::X, wq), ch, at);
        m.w_x = exact_parity(measured_probs(cx, wq, noise));
    }
    {
        const Circuit cy = insert_channel(append_basis_rotation(base, MeasBasis::Y, wq), ch, at);
        m.w_y = exact_parity(measured_probs(cy, wq, noise));
    }
    {
        const std::vector<int> rp = {layout.r, layout.p};
        const Circuit cz = insert_channel(with_measured(base, rp), ch, at);
        m.v = exact_visibility(measured_probs(cz, rp, noise));
    }
    m.c_mag = std::hypot(m.w_x, m.w_y);
    return m;
}

SweepResult deviation_curves(int k, double mu, ChannelFamily family, const InsertionPoint& at,
                             const std::vector<double>& lambdas,
                             const std::optional<NoiseSpec>& noise) {
    if (lambdas.empty()) throw validation_error("deviation_curves: empty lambda grid");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] >= 0.0 && lambdas[i] <= 1.0))
            throw validation_error("deviation_curves: grid values must be in [0, 1]");
        if (i > 0 && lambdas[i] <= lambdas[i - 1])
            throw validation_error("deviation_curves: grid must be strictly increasing");
    }

    SweepResult sweep;
    sweep.channel_family_id = channel_family_name(family);
    sweep.insertion = at;
    sweep.k = k;
    sweep.mu = mu;
    sweep.noisy = noise.has_value();
    sweep.baseline = exact_metrics_with_channel(k, mu, family, 0.0, at, noise);
    sweep.points.reserve(lambdas.size());
    for (double lambda : lambdas) {
        SweepPoint pt;
        pt.lambda = lambda;
        pt.predicted = lambda == 0.0 ? sweep.baseline
                                     : exact_metrics_with_channel(k, mu, family, lambda, at, noise);
        sweep.points.push_back(pt);
    }
    return sweep;
}

double combined_band(double shot_sigma, double device_delta) {
    if (shot_sigma < 0.0 || device_delta < 0.0)
        throw validation_error("combined_band: components must be >= 0");
    return std::hypot(shot_sigma, device_delta);
}

DetectabilityResult detectability_threshold(const SweepResult& sweep,
                                            const UncertaintyBand& bands) {
    if (sweep.points.size() < 2)
        throw validation_error("detectability_threshold: sweep needs >= 2 points");
    if (std::abs(sweep.points.front().lambda) > 1e-12)
        throw validation_error("detectability_threshold: sweep must include lambda = 0");
    for (std::size_t i = 1; i < sweep.points.size(); ++i)
        if (sweep.points[i].lambda <= sweep.points[i - 1].lambda)
            throw validation_error("detectability_threshold: sweep points are not sorted");

    struct MetricRef {
        const char* name;
        double MetricSet::* value;
        double UncertaintyBand::* band;
    };
    static constexpr MetricRef kMetrics[] = {
        {"v", &MetricSet::v, &UncertaintyBand::v},
        {"w_x", &MetricSet::w_x, &UncertaintyBand::w_x},
        {"w_y", &MetricSet::w_y, &UncertaintyBand::w_y},
        {"c_mag", &MetricSet::c_mag, &UncertaintyBand::c_mag},
    };

    for (const auto& pt : sweep.points) {
        for (const auto& metric : kMetrics) {
            const double dev = std::abs(pt.predicted.*metric.value - sweep.baseline.*metric.value);
            if (dev > sweep.k_sigma * (bands.*metric.band))
                return {pt.lambda, metric.name};
        }
    }
    return {std::numeric_limits<double>::infinity(), "none"};
}

double lambda_est(double w_hw, double w_ideal) {
    if (w_ideal == 0.0) throw validation_error("lambda_est: ideal witness value is zero");
    return (1.0 - w_hw / w_ideal) / 2.0;
}

double first_order_prediction(double w0, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw validation_error("first_order_prediction: lambda must be in [0, 1]");
    return (1.0 - 2.0 * lambda) * w0;
}

} // namespace btsim

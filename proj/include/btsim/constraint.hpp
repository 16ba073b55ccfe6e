// constraint.hpp
// Channel-strength constraint pipeline: predicted deviation curves over a
// lambda grid, combined uncertainty bands, detectability thresholds and the
// closed-form dephasing estimate.

#pragma once

#include "btsim/circuit.hpp"
#include "btsim/noise.hpp"

#include <optional>
#include <string>
#include <vector>

namespace btsim {

enum class ChannelFamily { PHASE_FLIP };

const char* channel_family_name(ChannelFamily family);

struct SweepPoint {
    double lambda = 0.0;
    MetricSet predicted; // exact density-matrix values, no sampling
};

struct SweepResult {
    std::string channel_family_id;
    InsertionPoint insertion;
    int k = 1;
    double mu = 1.0;
    bool noisy = false;
    MetricSet baseline; // metrics at lambda = 0 under the same noise setting
    std::vector<SweepPoint> points;
    double k_sigma = 2.0;
};

struct UncertaintyBand {
    double v = 0.0;
    double w_x = 0.0;
    double w_y = 0.0;
    double c_mag = 0.0;
};

struct DetectabilityResult {
    double lambda_max = 0.0; // +infinity when no grid point is detectable
    std::string deciding_metric; // "none" when undetectable
};

// Exact {V, W_X, W_Y, C_mag} with the channel at strength `lambda` inserted
// at `at`, optionally under the depolarizing + readout proxy.
MetricSet exact_metrics_with_channel(int k, double mu, ChannelFamily family, double lambda,
                                     const InsertionPoint& at,
                                     const std::optional<NoiseSpec>& noise = std::nullopt);

SweepResult deviation_curves(int k, double mu, ChannelFamily family, const InsertionPoint& at,
                             const std::vector<double>& lambdas,
                             const std::optional<NoiseSpec>& noise = std::nullopt);

// Quadrature combination sqrt(shot_sigma^2 + device_delta^2).
double combined_band(double shot_sigma, double device_delta);

// Smallest grid lambda whose predicted deviation in at least one metric
// exceeds k_sigma times that metric's band.
DetectabilityResult detectability_threshold(const SweepResult& sweep,
                                            const UncertaintyBand& bands);

// Inversion of the attenuation law W(lambda) = (1 - 2 lambda) W(0).
double lambda_est(double w_hw, double w_ideal);

// First-order prediction (1 - 2 lambda) w0.
double first_order_prediction(double w0, double lambda);

} // namespace btsim

#include "btsim/constraint.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace btsim;

namespace {

InsertionPoint pre_measure_on_f() { return {InsertLocation::PRE_MEASUREMENT, 2}; }

std::vector<double> grid(double start, double stop, double step) {
    std::vector<double> g;
    for (int i = 0;; ++i) {
        const double v = start + i * step;
        if (v > stop + 1e-12) break;
        g.push_back(std::min(v, stop));
    }
    return g;
}

} // namespace

TEST_CASE("deviation_curves") {
    SUBCASE("pre-measurement dephasing follows the exact attenuation law") {
        const SweepResult sweep = deviation_curves(1, 1.0, ChannelFamily::PHASE_FLIP,
                                                   pre_measure_on_f(), {0.0, 0.25, 0.5});
        REQUIRE(sweep.points.size() == 3);
        CHECK(sweep.points[0].predicted.w_x == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(sweep.points[1].predicted.w_x == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(sweep.points[2].predicted.w_x == doctest::Approx(0.0).epsilon(1e-9));
        for (const auto& pt : sweep.points) {
            CHECK(pt.predicted.w_x ==
                  doctest::Approx(first_order_prediction(sweep.baseline.w_x, pt.lambda))
                      .epsilon(1e-9));
            CHECK(pt.predicted.c_mag ==
                  doctest::Approx(std::hypot(pt.predicted.w_x, pt.predicted.w_y)).epsilon(1e-9));
        }
        CHECK(sweep.baseline.w_x == doctest::Approx(sweep.points[0].predicted.w_x).epsilon(1e-9));
    }
    SUBCASE("post-branch-split dephasing leaves V pinned at 1") {
        const SweepResult sweep =
            deviation_curves(1, 1.0, ChannelFamily::PHASE_FLIP,
                             {InsertLocation::POST_BRANCH_SPLIT, 2}, grid(0.0, 1.0, 0.1));
        for (const auto& pt : sweep.points)
            CHECK(pt.predicted.v == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("deviation is monotone on [0, 0.5]") {
        const SweepResult sweep = deviation_curves(1, 1.0, ChannelFamily::PHASE_FLIP,
                                                   pre_measure_on_f(), grid(0.0, 0.5, 0.05));
        double last = -1.0;
        for (const auto& pt : sweep.points) {
            const double dev = std::abs(pt.predicted.w_x - sweep.baseline.w_x);
            CHECK(dev >= last - 1e-12);
            last = dev;
        }
    }
    SUBCASE("singleton grid equals the baseline") {
        const SweepResult sweep =
            deviation_curves(1, 1.0, ChannelFamily::PHASE_FLIP, pre_measure_on_f(), {0.0});
        REQUIRE(sweep.points.size() == 1);
        CHECK(sweep.points[0].predicted.w_x == sweep.baseline.w_x);
        CHECK(sweep.points[0].predicted.v == sweep.baseline.v);
    }
    SUBCASE("grid validation") {
        CHECK_THROWS_AS(deviation_curves(1, 1.0, ChannelFamily::PHASE_FLIP, pre_measure_on_f(),
                                         {0.5, 0.25}),
                        validation_error);
        CHECK_THROWS_AS(deviation_curves(1, 1.0, ChannelFamily::PHASE_FLIP, pre_measure_on_f(),
                                         {0.0, 1.5}),
                        validation_error);
        CHECK_THROWS_AS(
            deviation_curves(1, 1.0, ChannelFamily::PHASE_FLIP, pre_measure_on_f(), {}),
            validation_error);
    }
}

TEST_CASE("combined_band") {
    CHECK(combined_band(0.0, 0.0) == 0.0);
    CHECK(combined_band(0.0038, 0.0) == 0.0038);
    CHECK(combined_band(0.0038, 0.0586) == doctest::Approx(0.0587231).epsilon(1e-5));
    CHECK_THROWS_AS(combined_band(-0.001, 0.0), validation_error);
}

TEST_CASE("detectability_threshold") {
    SUBCASE("inverts the attenuation law on a fine grid") {
        SweepResult sweep = deviation_curves(1, 1.0, ChannelFamily::PHASE_FLIP,
                                             pre_measure_on_f(), grid(0.0, 0.004, 0.0001));
        sweep.k_sigma = 1.0;
        UncertaintyBand bands;
        bands.v = 10.0;
        bands.w_x = 0.0038;
        bands.w_y = 10.0;
        bands.c_mag = 10.0;
        const DetectabilityResult res = detectability_threshold(sweep, bands);
        CHECK(res.deciding_metric == "w_x");
        CHECK(std::abs(res.lambda_max - 0.0019) <= 1.5e-4);
    }
    SUBCASE("huge bands are undetectable") {
        const SweepResult sweep = deviation_curves(1, 1.0, ChannelFamily::PHASE_FLIP,
                                                   pre_measure_on_f(), grid(0.0, 0.5, 0.1));
        UncertaintyBand bands{10.0, 10.0, 10.0, 10.0};
        const DetectabilityResult res = detectability_threshold(sweep, bands);
        CHECK(std::isinf(res.lambda_max));
        CHECK(res.deciding_metric == "none");
    }
    SUBCASE("zero k_sigma detects at the first nonzero grid point") {
        SweepResult sweep = deviation_curves(1, 1.0, ChannelFamily::PHASE_FLIP,
                                             pre_measure_on_f(), grid(0.0, 0.5, 0.1));
        sweep.k_sigma = 0.0;
        const DetectabilityResult res = detectability_threshold(sweep, UncertaintyBand{});
        CHECK(res.lambda_max == doctest::Approx(0.1).epsilon(1e-12));
    }
    SUBCASE("monotone in the bands") {
        SweepResult sweep = deviation_curves(1, 1.0, ChannelFamily::PHASE_FLIP,
                                             pre_measure_on_f(), grid(0.0, 0.5, 0.05));
        sweep.k_sigma = 1.0;
        double last = 0.0;
        for (double b : {0.01, 0.1, 0.3, 0.6, 1.2}) {
            UncertaintyBand bands{b, b, b, b};
            const double lm = detectability_threshold(sweep, bands).lambda_max;
            CHECK(lm >= last);
            last = lm;
        }
    }
    SUBCASE("validation") {
        SweepResult sweep = deviation_curves(1, 1.0, ChannelFamily::PHASE_FLIP,
                                             pre_measure_on_f(), {0.0, 0.1});
        SweepResult single = sweep;
        single.points.resize(1);
        CHECK_THROWS_AS(detectability_threshold(single, UncertaintyBand{}), validation_error);
        SweepResult shifted = sweep;
        shifted.points[0].lambda = 0.05;
        CHECK_THROWS_AS(detectability_threshold(shifted, UncertaintyBand{}), validation_error);
        SweepResult unsorted = sweep;
        std::swap(unsorted.points[0], unsorted.points[1]);
        CHECK_THROWS_AS(detectability_threshold(unsorted, UncertaintyBand{}), validation_error);
    }
}

TEST_CASE("lambda_est and first_order_prediction") {
    CHECK(lambda_est(0.8398, 1.0) == doctest::Approx(0.0801).epsilon(1e-12));
    CHECK(lambda_est(1.0, 1.0) == 0.0);
    CHECK(lambda_est(-0.8107, -1.0) == doctest::Approx(0.09465).epsilon(1e-12));
    CHECK_THROWS_AS(lambda_est(0.5, 0.0), validation_error);

    CHECK(first_order_prediction(1.0, 0.080) == doctest::Approx(0.84).epsilon(1e-12));
    CHECK(first_order_prediction(0.7, 0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(first_order_prediction(0.7, 0.0) == 0.7);

    for (double w0 : {1.0, -0.8, 0.3}) {
        for (double lambda : {0.0, 0.1, 0.45, 0.9, 1.0}) {
            CHECK(lambda_est(first_order_prediction(w0, lambda), w0) ==
                  doctest::Approx(lambda).epsilon(1e-12));
        }
    }
}

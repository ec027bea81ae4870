#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "emx/reference.hpp"
#include "emx/rng.hpp"
#include "emx/synth.hpp"
#include "support/fixtures.hpp"
#include "support/stats.hpp"

using namespace emx;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

TraceSpec trace_around(double f_center_hz, double halfspan_hz, std::size_t n,
                       std::uint64_t seed, int n_averages = 100) {
    TraceSpec t;
    t.frequency_grid_hz.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        t.frequency_grid_hz[i] =
            f_center_hz - halfspan_hz + 2.0 * halfspan_hz * static_cast<double>(i) / (n - 1);
    t.rbw_hz = 2.0 * halfspan_hz / static_cast<double>(n - 1);
    t.n_averages = n_averages;
    t.seed = seed;
    return t;
}

}  // namespace

TEST_CASE("spectrum generator") {
    auto sys = reference::device_mode11();
    sys.op.bias_voltage = 0.0;  // no drive transduction, pure noise trace
    const double f_res = rad_to_hz(anti_spring_frequency(sys.mode, sys.stack, sys.op));

    SECTION("fixed seed reproduces the trace bit for bit") {
        const auto a = gen_spectrum(sys, trace_around(f_res, 1e3, 801, 42));
        const auto b = gen_spectrum(sys, trace_around(f_res, 1e3, 801, 42));
        CHECK(a.readings == b.readings);
        const auto c = gen_spectrum(sys, trace_around(f_res, 1e3, 801, 43));
        CHECK(a.readings != c.readings);
    }
    SECTION("bin averages converge on the model trace") {
        const auto ds = gen_spectrum(sys, trace_around(f_res, 1e3, 2001, 7, 10000));
        std::vector<double> omega(ds.abscissa.size());
        for (std::size_t i = 0; i < omega.size(); ++i) omega[i] = hz_to_rad(ds.abscissa[i]);
        const auto truth = sideband_spectrum(sys.mode, sys.cavity, sys.stack, sys.op, omega,
                                             sys.g0_override);
        double ratio_sum = 0.0;
        for (std::size_t i = 0; i < truth.size(); ++i) ratio_sum += ds.readings[i] / truth[i];
        CHECK_THAT(ratio_sum / static_cast<double>(truth.size()), WithinAbs(1.0, 0.03));
    }
    SECTION("quiet configuration leaves the detection floor") {
        SystemParams quiet = sys;
        quiet.op.pump_power = 0.0;
        quiet.op.temperature = 0.0;
        quiet.op.rf_noise_psd = 0.0;
        const auto ds = gen_spectrum(quiet, trace_around(f_res, 1e3, 512, 5, 200));
        for (double v : ds.readings) CHECK(v > 0.0);
        double m = 0.0;
        for (double v : ds.readings) m += v / quiet.op.detector_psd;
        CHECK_THAT(m / static_cast<double>(ds.readings.size()), WithinAbs(1.0, 0.02));
    }
    SECTION("coherent drive appears as a single-bin spike scaled by 1/rbw") {
        SystemParams driven = reference::device_mode11();  // 49 V: full transduction
        const double f_drive = rad_to_hz(driven.op.rf_frequency);
        auto narrow = trace_around(f_drive, 500.0, 1001, 11, 400);
        auto ds = gen_spectrum(driven, narrow);
        const std::size_t peak_bin = static_cast<std::size_t>(
            std::max_element(ds.readings.begin(), ds.readings.end()) - ds.readings.begin());
        CHECK_THAT(ds.abscissa[peak_bin], WithinAbs(f_drive, narrow.rbw_hz));

        // Doubling the rbw halves the spike PSD on top of the noise.
        auto coarse = narrow;
        coarse.rbw_hz *= 2.0;
        const auto ds2 = gen_spectrum(driven, coarse);
        const double gtot = total_gain(driven.mode, driven.cavity, driven.stack, driven.op,
                                       driven.op.rf_frequency, driven.g0_override);
        const double spike1 = gtot * gtot * driven.op.rf_drive_psd / narrow.rbw_hz;
        const double spike2 = 0.5 * spike1;
        CHECK_THAT(ds.readings[peak_bin] - ds2.readings[peak_bin],
                   WithinRel(spike1 - spike2, 0.2));
    }
    SECTION("grid must be sorted") {
        auto t = trace_around(f_res, 1e3, 64, 1);
        std::swap(t.frequency_grid_hz[3], t.frequency_grid_hz[4]);
        CHECK_THROWS_AS(gen_spectrum(sys, t), config_error);
    }
}

TEST_CASE("ringdown generator") {
    auto sys = reference::device_mode11();
    sys.op.pump_power = 0.0;  // probe off: decay at the intrinsic linewidth
    sys.op.bias_voltage = 0.0;

    SECTION("noiseless series is the exact exponential") {
        const auto ds = gen_ringdown(sys, 2e3, 0.05, 1.0, 0.0, 3);
        for (std::size_t i = 0; i < ds.abscissa.size(); ++i)
            CHECK_THAT(ds.readings[i],
                       WithinRel(std::exp(-0.5 * sys.mode.gamma_m0 * ds.abscissa[i]), 1e-12));
    }
    SECTION("seed determinism") {
        const auto a = gen_ringdown(sys, 2e3, 0.05, 1.0, 0.02, 9);
        const auto b = gen_ringdown(sys, 2e3, 0.05, 1.0, 0.02, 9);
        CHECK(a.readings == b.readings);
    }
    SECTION("short record warns") {
        const auto ds = gen_ringdown(sys, 2e3, 1e-3, 1.0, 0.0, 3);
        REQUIRE_FALSE(ds.warnings.empty());
    }
    SECTION("pump on decays at the cold-damped rate") {
        auto pumped = reference::device_mode11();
        pumped.op.bias_voltage = 0.0;
        const auto d = evaluate(pumped);
        const auto ds = gen_ringdown(pumped, 2e3, 0.05, 1.0, 0.0, 3);
        const double slope = std::log(ds.readings.front() / ds.readings.back()) /
                             (ds.abscissa.back() - ds.abscissa.front());
        CHECK_THAT(2.0 * slope, WithinRel(d.gamma_em, 1e-9));
    }
}

TEST_CASE("area series generator") {
    auto sys = reference::device_mode11();
    const double chain = reference::chain_gain(sys, reference::mode11_anchors());

    SECTION("thermal sweep reproduces the calibrated slope") {
        sys.op.bias_voltage = 0.0;
        std::vector<double> temps;
        for (int i = 1; i <= 10; ++i) temps.push_back(0.05 * i);
        const auto ds = gen_area_series(sys, DatasetKind::area_vs_t, temps, chain, 0.0, 1);
        const double slope =
            (ds.readings.back() - ds.readings.front()) / (temps.back() - temps.front());
        CHECK_THAT(slope, WithinRel(3.57e-10, 1e-9));
        // 500 mK holds fifty times the 10 mK area.
        const auto ratio_ds = gen_area_series(sys, DatasetKind::area_vs_t, {0.01, 0.5}, chain,
                                              0.0, 1);
        CHECK_THAT(ratio_ds.readings[1], WithinRel(50.0 * ratio_ds.readings[0], 1e-12));
    }
    SECTION("bias sweep is symmetric about the charge offset") {
        sys.op.charge_offset_voltage = 3.0;
        std::vector<double> biases;
        for (int i = -8; i <= 8; ++i) biases.push_back(3.0 + 5.0 * i);
        const auto ds = gen_area_series(sys, DatasetKind::area_vs_v, biases, chain, 0.0, 1);
        const std::size_t n = ds.readings.size();
        for (std::size_t i = 0; i < n / 2; ++i)
            CHECK_THAT(ds.readings[i], WithinRel(ds.readings[n - 1 - i], 1e-9));
        const std::size_t imin = static_cast<std::size_t>(
            std::min_element(ds.readings.begin(), ds.readings.end()) - ds.readings.begin());
        CHECK(std::abs(ds.abscissa[imin] - 3.0) <= 5.0);
    }
    SECTION("seed determinism with noise") {
        const auto a = gen_area_series(sys, DatasetKind::area_vs_t, {0.01, 0.1, 0.2}, chain,
                                       0.03, 17);
        const auto b = gen_area_series(sys, DatasetKind::area_vs_t, {0.01, 0.1, 0.2}, chain,
                                       0.03, 17);
        CHECK(a.readings == b.readings);
    }
}

TEST_CASE("snr series generator") {
    SECTION("mode 12 saturates inside the bias window, mode 11 does not") {
        auto m12 = reference::device_mode12();
        std::vector<double> biases;
        for (int i = 1; i <= 49; i += 2) biases.push_back(static_cast<double>(i));
        const auto ds12 = gen_snr_series(m12, biases, 0.0, 1);
        const double plateau12 = std::sqrt(m12.op.rf_drive_psd / m12.op.rf_noise_psd);
        CHECK(ds12.readings.back() > 0.7 * plateau12);

        auto m11 = reference::device_mode11();
        const auto ds11 = gen_snr_series(m11, biases, 0.0, 1);
        const double plateau11 = std::sqrt(m11.op.rf_drive_psd / m11.op.rf_noise_psd);
        CHECK(ds11.readings.back() < 0.2 * plateau11);
    }
    SECTION("small-bias response is linear") {
        auto sys = reference::device_mode12();
        const auto ds = gen_snr_series(sys, {0.125, 0.25, 0.5}, 0.0, 1);
        CHECK_THAT(ds.readings[1] / ds.readings[0], WithinRel(2.0, 5e-3));
        CHECK_THAT(ds.readings[2] / ds.readings[1], WithinRel(2.0, 5e-3));
    }
    SECTION("saturation bound holds everywhere") {
        auto sys = reference::device_mode12();
        std::vector<double> biases;
        for (int i = 1; i <= 60; ++i) biases.push_back(2.0 * i);
        const auto ds = gen_snr_series(sys, biases, 0.0, 1);
        const double plateau = std::sqrt(sys.op.rf_drive_psd / sys.op.rf_noise_psd);
        for (double v : ds.readings) CHECK(v <= plateau * (1.0 + 1e-12));
    }
}

TEST_CASE("averaged-bin statistics follow the gamma law") {
    Rng rng(20240917);
    const int shape = 8;
    std::vector<double> samples(100000);
    for (auto& s : samples) s = rng.averaged_bin_multiplier(shape);

    const double d = emxtest::ks_distance(
        samples, [&](double x) { return emxtest::gamma_p(shape, shape * x); });
    // 1% critical value 1.628 / sqrt(n).
    CHECK(d < 1.628 / std::sqrt(static_cast<double>(samples.size())));

    CHECK_THAT(emxtest::mean(samples), WithinAbs(1.0, 0.005));
    CHECK_THAT(emxtest::variance(samples), WithinRel(1.0 / shape, 0.05));
}

TEST_CASE("normal and uniform sampling sanity") {
    Rng rng(5);
    std::vector<double> n(50000), u(50000);
    for (auto& v : n) v = rng.normal();
    for (auto& v : u) v = rng.uniform();
    CHECK_THAT(emxtest::mean(n), WithinAbs(0.0, 0.02));
    CHECK_THAT(emxtest::variance(n), WithinAbs(1.0, 0.03));
    CHECK_THAT(emxtest::mean(u), WithinAbs(0.5, 0.005));
    CHECK(*std::min_element(u.begin(), u.end()) >= 0.0);
    CHECK(*std::max_element(u.begin(), u.end()) < 1.0);
}

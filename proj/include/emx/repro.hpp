#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "emx/design.hpp"
#include "emx/geometry.hpp"
#include "emx/model.hpp"
#include "emx/recipes.hpp"
#include "emx/reference.hpp"
#include "emx/rng.hpp"
#include "emx/synth.hpp"

namespace emx::repro {

// The one-shot reproduction suite: every published anchor the toolkit is
// expected to reproduce, each with its tolerance pinned in code. All
// data-driven rows run on seeded synthetic datasets through the same
// generators and fit recipes a user would call.

struct Check {
    std::string id;
    std::string name;
    double computed = 0.0;
    double expected = 0.0;
    std::string tolerance;
    bool pass = false;
};

namespace detail {

inline Check window(std::string id, std::string name, double computed, double expected,
                    double rel_tol) {
    Check c{std::move(id), std::move(name), computed, expected, "", false};
    c.pass = std::abs(computed - expected) <= rel_tol * std::abs(expected);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "+-%g%%", 100.0 * rel_tol);
    c.tolerance = buf;
    return c;
}

inline Check absolute(std::string id, std::string name, double computed, double expected,
                      double abs_tol, const char* unit) {
    Check c{std::move(id), std::move(name), computed, expected, "", false};
    c.pass = std::abs(computed - expected) <= abs_tol;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "+-%g %s", abs_tol, unit);
    c.tolerance = buf;
    return c;
}

inline Check ceiling(std::string id, std::string name, double computed, double limit,
                     const char* unit) {
    Check c{std::move(id), std::move(name), computed, limit, "", false};
    c.pass = computed <= limit;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "<= %g %s", limit, unit);
    c.tolerance = buf;
    return c;
}

inline MembraneGeometry published_membrane() {
    MembraneGeometry g;
    g.length_y = 110e-6;
    g.length_z = 140e-6;
    g.thickness = 90e-9;
    g.stress = 1e9;
    g.density = 3100.0;
    g.metal_thickness = 30e-9;
    g.metal_density = 2700.0;
    g.electrode = {55e-6, 70e-6, 90e-6, 120e-6};
    return g;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Closed-form rows
// ---------------------------------------------------------------------------

inline std::vector<Check> closed_form_checks() {
    std::vector<Check> out;

    {  // 1: resonant gain at the design projection, with its runtime bound
        const auto t0 = std::chrono::steady_clock::now();
        ProjectionResult r{};
        for (int i = 0; i < 1000; ++i) r = reproduce_projection();
        const auto t1 = std::chrono::steady_clock::now();
        const double us =
            std::chrono::duration<double, std::micro>(t1 - t0).count() / 1000.0;
        out.push_back(detail::absolute("1a", "projection gain (dB)", r.gain_db, 44.0, 1.0, "dB"));
        out.push_back(detail::ceiling("1b", "projection gain evaluation time (us)", us, 1000.0,
                                      "us (< 1 ms)"));
        // 2: sensitivity projections
        out.push_back(detail::ceiling("2a", "projection sensitivity (fV/rtHz)",
                                      r.sensitivity_v * 1e15, 200.0, "fV/rtHz"));
        out.push_back(detail::window("2b", "projection charge sensitivity (ne/rtHz)",
                                     r.sensitivity_e * 1e9, 10.0, 0.15));
    }
    {  // 3: capacitance scale of the 20 um x 20 um, 500 nm design pad
        CapacitorStack s;
        s.gap = 500e-9;
        s.membrane_cap_area = 400e-12;
        s.stray_cap = 1e-15;
        s.bias_cap = 1e-12;
        const double dc = membrane_capacitance_dx(s, 0.0);
        const double cm = membrane_capacitance(s, 0.0);
        out.push_back(detail::window("3a", "plate lever arm (nF/m)", dc * 1e9, 15.0, 0.10));
        const double factor = std::max(10e-15 / cm, cm / 10e-15);
        out.push_back(detail::ceiling("3b", "plate capacitance vs 10 fF (ratio)", factor, 1.5,
                                      "x (fringing)"));
    }
    {  // 4: plate-theory frequency ratio against the measured pair
        const auto g = detail::published_membrane();
        const double ratio = plate_mode_frequency(g, 1, 2) / plate_mode_frequency(g, 1, 1);
        out.push_back(detail::window("4", "mode frequency ratio 12/11", ratio, 3.75 / 2.54,
                                     0.02));
    }
    {  // 5: participation ratio from the assembly frequency shift
        out.push_back(detail::absolute("5", "vacuum-gap participation ratio",
                                       participation_ratio_from_frequencies(7.04e9, 6.21e9),
                                       0.22, 0.01, ""));
    }
    {  // 6: cold damping pairs
        out.push_back(detail::window("6a", "cold-damped linewidth, mode 11 (Hz)",
                                     rad_to_hz(cold_damped_linewidth(hz_to_rad(89.0), 0.28)),
                                     114.0, 0.01));
        out.push_back(detail::window("6b", "cold-damped linewidth, mode 12 (Hz)",
                                     rad_to_hz(cold_damped_linewidth(hz_to_rad(16.0), 0.5)),
                                     24.0, 0.01));
    }
    {  // 7 (conversion part): voltage-to-charge with C_eq = 15 fF
        out.push_back(detail::window(
            "7a", "mode-11 sensitivity conversion (ue/rtHz)",
            charge_from_voltage_sensitivity(0.9e-9, reference::device_c_eq) * 1e6, 87.0, 0.05));
        out.push_back(detail::window(
            "7b", "mode-12 sensitivity conversion (ue/rtHz)",
            charge_from_voltage_sensitivity(7.8e-9, reference::device_c_eq) * 1e6, 760.0, 0.05));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic-data rows
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return v;
}

inline TraceSpec trace(double f_center_hz, double halfspan_hz, int n, std::uint64_t seed,
                       int n_averages) {
    TraceSpec t;
    t.frequency_grid_hz = linspace(f_center_hz - halfspan_hz, f_center_hz + halfspan_hz, n);
    t.rbw_hz = 2.0 * halfspan_hz / (n - 1);
    t.n_averages = n_averages;
    t.seed = seed;
    return t;
}

inline SnrFit snr_round_trip(const SystemParams& sys, std::uint64_t seed) {
    const auto ds = gen_snr_series(sys, linspace(1.0, 49.0, 25), 0.03, seed);
    return fit_snr_vs_v(to_series(ds), sys);
}

}  // namespace detail

inline std::vector<Check> synthetic_checks(std::uint64_t seed = 20240901) {
    std::vector<Check> out;

    // 7 (SNR part) + 8: bias-sweep SNR round trips for both modes.
    {
        const auto m11 = reference::device_mode11();
        const auto fit11 = detail::snr_round_trip(m11, seed);
        const auto rep11 = sensitivity_report(fit11, m11, reference::device_c_eq);
        out.push_back(detail::absolute("7c", "mode-11 peak SNR on synthetic sweep (dB)",
                                       rep11.max_snr_db, 96.0, 1.0, "dB"));

        const auto m12 = reference::device_mode12();
        const auto fit12 = detail::snr_round_trip(m12, seed + 1);
        const auto rep12 = sensitivity_report(fit12, m12, reference::device_c_eq);
        out.push_back(detail::absolute("7d", "mode-12 peak SNR on synthetic sweep (dB)",
                                       rep12.max_snr_db, 78.0, 1.0, "dB"));

        out.push_back(detail::window("8a", "mode-12 bias-line noise (nV/rtHz)",
                                     std::sqrt(fit12.s_vv_n) * 1e9, 7.8, 0.15));
        out.push_back(detail::absolute("8b", "mode-12 recovered drive power (dBm)",
                                       fit12.s_vv_s_dbm, -70.0, 0.5, "dB"));
    }

    // 9: thermalization slopes through the area fits.
    {
        for (auto [id, anchors, sys] :
             {std::tuple{"9a", reference::mode11_anchors(), reference::device_mode11()},
              std::tuple{"9b", reference::mode12_anchors(), reference::device_mode12()}}) {
            sys.op.bias_voltage = 0.0;
            const double chain = reference::chain_gain(sys, anchors);
            const auto ds = gen_area_series(sys, DatasetKind::area_vs_t,
                                            detail::linspace(0.01, 0.5, 12), chain, 0.03,
                                            seed + 7);
            const auto fit = fit_area_vs_t(to_series(ds), sys);
            out.push_back(detail::window(
                id, std::string("thermalization slope (V^2/K), mode ") + (id[1] == 'a' ? "11" : "12"),
                fit.slope, anchors.slope_v2_per_k, 0.10));
        }
    }

    // 11: anti-spring round trip through per-bias spectra.
    {
        int idx = 0;
        for (auto sys : {reference::device_mode11(), reference::device_mode12()}) {
            const auto anchors =
                idx == 0 ? reference::mode11_anchors() : reference::mode12_anchors();
            sys.op.temperature = 0.5;   // warm traces give clear thermal peaks
            sys.op.rf_drive_psd = 0.0;  // frequency tracking runs on the noise sideband
            DataSeries curve;
            int k = 0;
            for (double v : detail::linspace(-49.0, 49.0, 13)) {
                SystemParams at = sys;
                at.op.bias_voltage = v;
                const double f_res =
                    rad_to_hz(anti_spring_frequency(at.mode, at.stack, at.op));
                const auto ds = gen_spectrum(
                    at, detail::trace(f_res, 1.5e3, 1201, seed + 100 * idx + k++, 200));
                const auto peak = fit_lorentzian(to_series(ds));
                curve.x.push_back(v);
                curve.y.push_back(hz_to_rad(peak.center));
                curve.sigma.push_back(hz_to_rad(std::max(peak.center_sigma, 0.1)));
            }
            const auto fit = fit_antispring(curve, sys.mode, sys.stack);
            const char* mode_tag = idx == 0 ? "11" : "12";
            out.push_back(detail::window(idx == 0 ? "11a" : "11c",
                                         std::string("anti-spring gap (um), mode ") + mode_tag,
                                         fit.gap * 1e6, reference::device_gap * 1e6, 0.05));
            out.push_back(detail::window(idx == 0 ? "11b" : "11d",
                                         std::string("zero-bias frequency (MHz), mode ") +
                                             mode_tag,
                                         rad_to_hz(fit.omega_m0) * 1e-6, anchors.f_m0_hz * 1e-6,
                                         0.001));
            ++idx;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Property rows (derivative checks, factorization, quadrature, coverage,
// optimizer agreement)
// ---------------------------------------------------------------------------

namespace detail {

inline CapacitorStack random_stack(Rng& rng) {
    CapacitorStack s;
    s.gap = 0.3e-6 * std::pow(10.0, rng.uniform());            // 0.3 .. 3 um
    s.membrane_cap_area = 1e-10 * std::pow(100.0, rng.uniform());
    s.stray_cap = 1e-14 * std::pow(10.0, rng.uniform());
    s.bias_cap = 2e-14 * std::pow(50.0, rng.uniform());
    s.bias_resistance = rng.uniform() * 2e3;
    return s;
}

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace detail

/// Largest relative deviation of the analytic capacitor derivatives and the
/// cavity pull from central finite differences over `n` random networks.
inline double worst_finite_difference_error(int n = 100, std::uint64_t seed = 99) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const CapacitorStack s = detail::random_stack(rng);
        MicrowaveCavity c;
        c.inductance = 1e-8 * std::pow(5.0, rng.uniform());
        c.kappa_c = hz_to_rad(0.1e6 + 0.9e6 * rng.uniform());
        c.kappa_i = hz_to_rad(0.5e6 + 1.5e6 * rng.uniform());
        c.line_impedance = 50.0;
        const double x = (rng.uniform() * 1.4 - 0.7) * s.gap;
        const double h = s.gap * 1e-6;

        auto cd = [&](auto&& f) {
            return (f(x + h) - f(x - h)) / (2.0 * h);
        };
        worst = std::max(worst,
                         detail::rel_err(membrane_capacitance_dx(s, x),
                                         cd([&](double u) { return membrane_capacitance(s, u); })));
        worst = std::max(
            worst, detail::rel_err(membrane_capacitance_dxx(s, x),
                                   cd([&](double u) { return membrane_capacitance_dx(s, u); })));
        worst = std::max(
            worst, detail::rel_err(equivalent_capacitance_dx(s, x),
                                   cd([&](double u) { return equivalent_capacitance(s, u); })));
        worst = std::max(
            worst, detail::rel_err(equivalent_capacitance_dxx(s, x),
                                   cd([&](double u) { return equivalent_capacitance_dx(s, u); })));
        worst = std::max(worst,
                         detail::rel_err(frequency_pull(c, s, x),
                                         cd([&](double u) { return cavity_frequency(c, s, u); })));
    }
    return worst;
}

/// Largest relative gap between the product-form resonant gain and the
/// closed form over random resolved-sideband operating points.
inline double worst_factorization_error(int n = 100, std::uint64_t seed = 7) {
    Rng rng(seed);
    double worst = 0.0;
    int done = 0;
    while (done < n) {
        SystemParams sys;
        sys.stack = detail::random_stack(rng);
        sys.cavity.inductance = 1e-8 * std::pow(3.0, rng.uniform());
        sys.cavity.kappa_c = hz_to_rad(0.1e6 + 0.5e6 * rng.uniform());
        sys.cavity.kappa_i = hz_to_rad(0.4e6 + 1.0e6 * rng.uniform());
        sys.cavity.line_impedance = 50.0;
        sys.mode.omega_m0 = hz_to_rad(2e6 + 4e6 * rng.uniform());
        sys.mode.gamma_m0 = hz_to_rad(10.0 + 190.0 * rng.uniform());
        sys.mode.m_eff = 1e-12 * std::pow(10.0, rng.uniform());
        sys.op.bias_voltage = 5.0 + 44.0 * rng.uniform();
        sys.op.temperature = 0.01;
        sys.op.pump_power = dbm_to_watt(-90.0 + 25.0 * rng.uniform());

        const double kappa = cavity_linewidth(sys.cavity);
        double omega_v = 0.0, gamma_v = 0.0;
        try {
            omega_v = anti_spring_frequency(sys.mode, sys.stack, sys.op);
            gamma_v = bias_damping(sys.mode, sys.stack, sys.op);
        } catch (const domain_error&) {
            continue;  // pulled in; redraw
        }
        if (omega_v / kappa < 2.0) continue;  // outside the resolved-sideband family
        // The zero-point amplitude is referenced to the zero-bias frequency;
        // the closed form runs at the softened one. Stay in the device family
        // where the shift is below a percent, as the 1% bound presumes.
        if ((sys.mode.omega_m0 - omega_v) / sys.mode.omega_m0 > 0.01) continue;
        sys.op.pump_detuning = -omega_v;

        const double g0 = vacuum_coupling(sys.mode, sys.cavity, sys.stack).g0;
        const double nph = photon_number(sys.cavity, sys.stack, sys.op);
        const double coop = cooperativity(g0, nph, kappa, gamma_v);
        if (coop > 0.5) continue;

        const double product = total_gain(sys.mode, sys.cavity, sys.stack, sys.op, omega_v);
        const double closed = total_gain_resonant(
            coop, sys.cavity.kappa_c, kappa, sys.cavity.line_impedance,
            cavity_frequency(sys.cavity, sys.stack, 0.0), omega_v, sys.mode.m_eff, gamma_v,
            effective_bias(sys.op) * equivalent_capacitance_dx(sys.stack, 0.0));
        worst = std::max(worst, detail::rel_err(product, closed));
        ++done;
    }
    return worst;
}

/// Relative gap between the trapezoid quadrature of the sideband peak and
/// the closed-form area on the published mode-11 system.
inline double quadrature_area_error() {
    auto sys = reference::device_mode11();
    sys.op.bias_voltage = 0.0;
    const auto d = evaluate(sys);
    const auto w = detail::linspace(d.omega_m_v - 100.0 * d.gamma_em,
                                    d.omega_m_v + 100.0 * d.gamma_em, 20001);
    const auto spec = sideband_spectrum(sys.mode, sys.cavity, sys.stack, sys.op, w,
                                        sys.g0_override);
    double integral = 0.0;
    for (std::size_t i = 1; i < w.size(); ++i)
        integral += 0.5 * (spec[i] + spec[i - 1] - 2.0 * sys.op.detector_psd) *
                    (w[i] - w[i - 1]) / two_pi;
    const double area = sideband_area(sys.mode, sys.stack, sys.op, d.gain_em, d.gamma_em);
    return detail::rel_err(integral, area);
}

struct Coverage {
    int hits = 0;
    int trials = 0;
    double fraction() const { return trials ? static_cast<double>(hits) / trials : 0.0; }
};

/// 100-seed blind round trips for every fit recipe; an estimate counts as a
/// hit when it lies within two reported sigma of the generator truth.
inline std::vector<std::pair<std::string, Coverage>> coverage_by_recipe(int n_seeds = 100) {
    std::vector<std::pair<std::string, Coverage>> out;

    auto tally = [](Coverage& cov, double est, double sigma, double truth) {
        ++cov.trials;
        if (std::abs(est - truth) <= 2.0 * sigma) ++cov.hits;
    };

    {  // lorentzian on warmed zero-bias spectra
        Coverage cov;
        auto sys = reference::device_mode11();
        sys.op.bias_voltage = 0.0;
        sys.op.temperature = 0.5;
        const auto d = evaluate(sys);
        for (int s = 0; s < n_seeds; ++s) {
            const auto ds = gen_spectrum(
                sys, detail::trace(rad_to_hz(d.omega_m_v), 1.2e3, 801, 1000 + s, 100));
            const auto fit = fit_lorentzian(to_series(ds));
            tally(cov, fit.center, fit.center_sigma, rad_to_hz(d.omega_m_v));
            tally(cov, fit.fwhm, fit.fwhm_sigma, rad_to_hz(d.gamma_em));
        }
        out.emplace_back("lorentzian", cov);
    }
    {  // ringdown
        Coverage cov;
        auto sys = reference::device_mode12();
        sys.op.pump_power = 0.0;
        sys.op.bias_voltage = 0.0;
        for (int s = 0; s < n_seeds; ++s) {
            const auto ds = gen_ringdown(sys, 1.5e3, 0.06, 1.0, 0.01, 2000 + s);
            const auto fit = fit_ringdown(to_series(ds));
            tally(cov, fit.energy_rate, fit.energy_rate_sigma, sys.mode.gamma_m0);
        }
        out.emplace_back("ringdown", cov);
    }
    {  // anti-spring on direct frequency-vs-bias series
        Coverage cov;
        const auto sys = reference::device_mode11();
        for (int s = 0; s < n_seeds; ++s) {
            Rng rng(3000 + s);
            DataSeries d;
            for (double v : detail::linspace(-49.0, 49.0, 15)) {
                OperatingPoint op = sys.op;
                op.bias_voltage = v;
                d.x.push_back(v);
                d.y.push_back(anti_spring_frequency(sys.mode, sys.stack, op) +
                              hz_to_rad(2.0) * rng.normal());
                d.sigma.push_back(hz_to_rad(2.0));
            }
            const auto fit = fit_antispring(d, sys.mode, sys.stack);
            tally(cov, fit.gap, fit.gap_sigma, sys.stack.gap);
            tally(cov, fit.omega_m0, fit.omega_m0_sigma, sys.mode.omega_m0);
            tally(cov, fit.v0, fit.v0_sigma, 0.0);
        }
        out.emplace_back("antispring", cov);
    }
    {  // area versus temperature
        Coverage cov;
        auto sys = reference::device_mode11();
        sys.op.bias_voltage = 0.0;
        const double chain = reference::chain_gain(sys, reference::mode11_anchors());
        for (int s = 0; s < n_seeds; ++s) {
            const auto ds = gen_area_series(sys, DatasetKind::area_vs_t,
                                            detail::linspace(0.01, 0.5, 12), chain, 0.03,
                                            4000 + s);
            const auto fit = fit_area_vs_t(to_series(ds), sys);
            tally(cov, fit.slope, fit.slope_sigma, reference::mode11_anchors().slope_v2_per_k);
        }
        out.emplace_back("area_vs_t", cov);
    }
    {  // area versus bias
        Coverage cov;
        auto sys = reference::device_mode12();
        const double chain = reference::chain_gain(sys, reference::mode12_anchors());
        for (int s = 0; s < n_seeds; ++s) {
            const auto ds = gen_area_series(sys, DatasetKind::area_vs_v,
                                            detail::linspace(-49.0, 49.0, 21), chain, 0.03,
                                            5000 + s);
            const auto fit = fit_area_vs_v({{sys.op.temperature, to_series(ds)}}, sys, chain);
            tally(cov, fit.s_vv_n, fit.s_vv_n_sigma, sys.op.rf_noise_psd);
            tally(cov, fit.v0, fit.v0_sigma, 0.0);
        }
        out.emplace_back("area_vs_v", cov);
    }
    {  // snr versus bias
        Coverage cov;
        const auto sys = reference::device_mode12();
        for (int s = 0; s < n_seeds; ++s) {
            const auto fit = detail::snr_round_trip(sys, 6000 + s);
            tally(cov, fit.s_vv_s, fit.s_vv_s_sigma, sys.op.rf_drive_psd);
            tally(cov, fit.s_vv_n, fit.s_vv_n_sigma, sys.op.rf_noise_psd);
        }
        out.emplace_back("snr_vs_v", cov);
    }
    return out;
}

/// Continuous optimum against an exhaustive 100 x 100 grid argmin.
inline bool optimizer_matches_exhaustive_sweep() {
    SweepSpec spec;
    spec.base = reference::projection_system();
    spec.objectives = {Objective::min_sensitivity};
    spec.axes = {{"gap_m", 0.5e-6, 1.5e-6, 100, false}, {"quality_factor", 1e6, 1e8, 100, true}};
    const auto table = sweep(spec);
    std::size_t best_row = 0;
    for (std::size_t i = 1; i < table.rows.size(); ++i)
        if (table.rows[i][2] < table.rows[best_row][2]) best_row = i;

    const DesignConstraints cons{50.0, 0.0, 0.0, 0.0};
    const auto best = optimize(Objective::min_sensitivity, cons, spec.axes, spec.base);
    if (!best.feasible) return false;

    auto snap = [](const SweepAxis& a, double v) {
        int best_i = 0;
        double best_d = 1e300;
        for (int i = 0; i < a.count; ++i) {
            const double node = emx::detail::axis_value(a, i);
            if (std::abs(node - v) < best_d) {
                best_d = std::abs(node - v);
                best_i = i;
            }
        }
        return emx::detail::axis_value(a, best_i);
    };
    return snap(spec.axes[0], best.point[0]) == table.rows[best_row][0] &&
           snap(spec.axes[1], best.point[1]) == table.rows[best_row][1] &&
           best.value <= table.rows[best_row][2] * (1.0 + 1e-9);
}

inline std::vector<Check> property_checks() {
    std::vector<Check> out;
    out.push_back(detail::ceiling("10a", "finite-difference consistency (rel)",
                                  worst_finite_difference_error(), 1e-6, ""));
    out.push_back(detail::ceiling("10b", "gain factorization vs closed form (rel)",
                                  worst_factorization_error(), 0.01, ""));
    out.push_back(detail::ceiling("10c", "spectrum/area quadrature (rel)",
                                  quadrature_area_error(), 0.01, ""));
    for (const auto& [name, cov] : coverage_by_recipe()) {
        Check c;
        c.id = "10d";
        c.name = "2-sigma coverage, " + name;
        c.computed = cov.fraction();
        c.expected = 0.90;
        c.tolerance = ">= 0.90";
        c.pass = cov.fraction() >= 0.90;
        out.push_back(c);
    }
    {
        Check c;
        c.id = "10e";
        c.name = "optimizer equals exhaustive sweep argmin";
        const bool ok = optimizer_matches_exhaustive_sweep();
        c.computed = ok ? 1.0 : 0.0;
        c.expected = 1.0;
        c.tolerance = "exact";
        c.pass = ok;
        out.push_back(c);
    }
    return out;
}

inline std::vector<Check> run_all(std::uint64_t seed = 20240901) {
    std::vector<Check> all = closed_form_checks();
    for (auto& c : synthetic_checks(seed)) all.push_back(std::move(c));
    for (auto& c : property_checks()) all.push_back(std::move(c));
    return all;
}

}  // namespace emx::repro

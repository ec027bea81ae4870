#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>

#include "emx/geometry.hpp"
#include "emx/model.hpp"
#include "support/fixtures.hpp"

using namespace emx;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using emxtest::central_diff;

namespace {

MembraneGeometry device_membrane() {
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

// Analytic sin^2 integral over [a, b] for index p on length l.
double sin2_integral(double a, double b, double l, int p) {
    const double k = 2.0 * pi * p / l;
    return 0.5 * (b - a) - (std::sin(k * b) - std::sin(k * a)) / (2.0 * k);
}

}  // namespace

TEST_CASE("plate mode frequencies") {
    MembraneGeometry g = device_membrane();

    SECTION("square membrane degenerate pair") {
        g.length_z = g.length_y;
        g.electrode = {55e-6, 55e-6, 90e-6, 90e-6};
        CHECK(plate_mode_frequency(g, 1, 2) == plate_mode_frequency(g, 2, 1));
    }
    SECTION("12/11 ratio against the measured pair") {
        const double ratio = plate_mode_frequency(g, 1, 2) / plate_mode_frequency(g, 1, 1);
        CHECK_THAT(ratio, WithinRel(1.46461954448745399, 1e-12));
        CHECK_THAT(ratio, WithinRel(3.75 / 2.54, 0.02));
    }
    SECTION("frozen closed-form value") {
        CHECK_THAT(plate_mode_frequency(g, 1, 1), WithinRel(2.06289886087947990e7, 1e-12));
    }
    SECTION("strictly increasing in the indices") {
        CHECK(plate_mode_frequency(g, 2, 1) > plate_mode_frequency(g, 1, 1));
        CHECK(plate_mode_frequency(g, 1, 2) > plate_mode_frequency(g, 1, 1));
        CHECK(plate_mode_frequency(g, 3, 2) > plate_mode_frequency(g, 2, 2));
    }
    SECTION("non-physical geometry rejected") {
        g.stress = 0.0;
        CHECK_THROWS_AS(plate_mode_frequency(g, 1, 1), domain_error);
        g = device_membrane();
        g.density = -1.0;
        CHECK_THROWS_AS(plate_mode_frequency(g, 1, 1), domain_error);
    }
}

TEST_CASE("effective mass and read-out dilution") {
    MembraneGeometry g = device_membrane();

    SECTION("full electrode coverage gives the quarter mass") {
        g.electrode = {55e-6, 70e-6, 110e-6, 140e-6};
        g.metal_thickness = 0.0;
        const auto em = effective_mass(g, 1, 1);
        CHECK_THAT(em.dilution_factor, WithinAbs(1.0, 1e-10));
        CHECK_THAT(em.m_eff, WithinRel(em.quarter_mass, 1e-9));
        CHECK_THAT(em.physical_mass,
                   WithinRel(110e-6 * 140e-6 * 90e-9 * 3100.0, 1e-12));
    }
    SECTION("quadrature matches the analytic antiderivative") {
        const auto em11 = effective_mass(g, 1, 1);
        const double dy = sin2_integral(10e-6, 100e-6, 110e-6, 1) /
                          sin2_integral(0.0, 110e-6, 110e-6, 1);
        const double dz = sin2_integral(10e-6, 130e-6, 140e-6, 1) /
                          sin2_integral(0.0, 140e-6, 140e-6, 1);
        CHECK_THAT(em11.dilution_factor, WithinAbs(dy * dz, 1e-9));
        CHECK_THAT(em11.dilution_factor, WithinAbs(0.98557165585009657, 1e-9));
        const auto em12 = effective_mass(g, 1, 2);
        CHECK_THAT(em12.dilution_factor, WithinAbs(0.97202755301071821, 1e-9));
    }
    SECTION("model prediction reported against the calibrated masses") {
        // The measured masses (6.25 / 4.27 ng) enter the toolkit as inputs;
        // the geometric route only fixes their ratio through the dilution.
        const auto em11 = effective_mass(g, 1, 1);
        const auto em12 = effective_mass(g, 1, 2);
        CHECK(em11.m_eff > em11.quarter_mass);
        CHECK_THAT(em12.m_eff / em11.m_eff,
                   WithinRel(em11.dilution_factor / em12.dilution_factor, 1e-12));
    }
    SECTION("electrode outside the membrane rejected") {
        g.electrode = {105e-6, 70e-6, 20e-6, 120e-6};
        CHECK_THROWS_AS(effective_mass(g, 1, 1), domain_error);
    }
}

TEST_CASE("membrane capacitance and derivatives") {
    CapacitorStack s = emxtest::test_stack();

    SECTION("published scale: (20 um)^2 at 500 nm") {
        s.gap = 500e-9;
        s.membrane_cap_area = 400e-12;
        const double cm = membrane_capacitance(s, 0.0);
        const double dc = membrane_capacitance_dx(s, 0.0);
        CHECK_THAT(cm, WithinRel(7.08335025024e-15, 1e-12));
        CHECK_THAT(dc, WithinRel(1.41667005004800e-8, 1e-12));
        // Quoted device values are 10 fF and 15 nF/m including fringing.
        CHECK(10e-15 / cm < 1.5);
        CHECK_THAT(dc, WithinRel(15e-9, 0.10));
    }
    SECTION("half-gap displacement doubles the capacitance") {
        CHECK_THAT(membrane_capacitance(s, 0.5 * s.gap),
                   WithinRel(2.0 * membrane_capacitance(s, 0.0), 1e-12));
    }
    SECTION("finite-difference consistency") {
        const double h = s.gap * 1e-6;
        for (double x : {-0.5 * s.gap, 0.0, 0.3 * s.gap, 0.7 * s.gap}) {
            const double fd = central_diff([&](double u) { return membrane_capacitance(s, u); },
                                           x, h);
            CHECK_THAT(membrane_capacitance_dx(s, x), WithinRel(fd, 1e-6));
            const double fd2 = central_diff(
                [&](double u) { return membrane_capacitance_dx(s, u); }, x, h);
            CHECK_THAT(membrane_capacitance_dxx(s, x), WithinRel(fd2, 1e-6));
        }
    }
    SECTION("touching plates rejected") {
        CHECK_THROWS_AS(membrane_capacitance(s, s.gap), domain_error);
        CHECK_THROWS_AS(membrane_capacitance(s, -1.1 * s.gap), domain_error);
    }
}

TEST_CASE("equivalent capacitance of the series network") {
    CapacitorStack s = emxtest::test_stack();

    SECTION("large bias capacitor limit") {
        s.bias_cap = 1.0;  // effectively infinite
        CHECK_THAT(voltage_dilution(s, 0.0), WithinAbs(1.0, 1e-10));
        CHECK_THAT(equivalent_capacitance(s, 0.0),
                   WithinRel(membrane_capacitance(s, 0.0), 1e-10));
    }
    SECTION("equal series capacitors") {
        s.bias_cap = membrane_capacitance(s, 0.0);
        CHECK_THAT(voltage_dilution(s, 0.0), WithinRel(0.5, 1e-12));
        CHECK_THAT(equivalent_capacitance(s, 0.0),
                   WithinRel(0.5 * membrane_capacitance(s, 0.0), 1e-12));
    }
    SECTION("frozen network values") {
        CHECK_THAT(membrane_capacitance(s, 0.0), WithinRel(2.36111675008e-14, 1e-12));
        CHECK_THAT(equivalent_capacitance(s, 0.0), WithinRel(1.49828258020691816e-14, 1e-12));
        CHECK_THAT(voltage_dilution(s, 0.0), WithinRel(0.63456522433977606, 1e-12));
        CHECK_THAT(equivalent_capacitance_dx(s, 0.0),
                   WithinRel(6.33838681088921026e-9, 1e-12));
        CHECK_THAT(equivalent_capacitance_dxx(s, 0.0),
                   WithinRel(5.36282646480558591e-3, 1e-12));
    }
    SECTION("eta-squared chain rule against finite differences") {
        const double h = s.gap * 1e-6;
        for (double x : {-0.4 * s.gap, 0.0, 0.6 * s.gap}) {
            const double fd = central_diff(
                [&](double u) { return equivalent_capacitance(s, u); }, x, h);
            CHECK_THAT(equivalent_capacitance_dx(s, x), WithinRel(fd, 1e-6));
            const double fd2 = central_diff(
                [&](double u) { return equivalent_capacitance_dx(s, u); }, x, h);
            CHECK_THAT(equivalent_capacitance_dxx(s, x), WithinRel(fd2, 1e-6));
        }
    }
    SECTION("C_eq below both series members") {
        CHECK(equivalent_capacitance(s, 0.0) < membrane_capacitance(s, 0.0));
        CHECK(equivalent_capacitance(s, 0.0) < s.bias_cap);
    }
}

TEST_CASE("cavity frequency and pull") {
    CapacitorStack s = emxtest::test_stack();
    MicrowaveCavity c = emxtest::test_cavity();

    SECTION("bare resonator limit") {
        CapacitorStack tiny = s;
        tiny.membrane_cap_area = 1e-20;
        CHECK_THAT(cavity_frequency(c, tiny, 0.0),
                   WithinRel(1.0 / std::sqrt(c.inductance * s.stray_cap), 1e-4));
    }
    SECTION("frozen resonance") {
        CHECK_THAT(rad_to_hz(cavity_frequency(c, s, 0.0)),
                   WithinRel(6.20836869046734852e9, 1e-12));
    }
    SECTION("participation ratio from the frequency shift") {
        CHECK_THAT(participation_ratio_from_frequencies(7.04e9, 6.21e9),
                   WithinAbs(0.22189558044938017, 1e-12));
        CHECK_THAT(participation_ratio_from_frequencies(7.04e9, 6.21e9),
                   WithinAbs(0.22, 0.01));
    }
    SECTION("pull against finite differences, sign included") {
        const double h = s.gap * 1e-6;
        for (double x : {0.0, 0.2 * s.gap}) {
            const double fd = central_diff([&](double u) { return cavity_frequency(c, s, u); },
                                           x, h);
            CHECK_THAT(frequency_pull(c, s, x), WithinRel(fd, 1e-6));
        }
        CHECK(frequency_pull(c, s, 0.0) < 0.0);
    }
}

TEST_CASE("anti-spring shift") {
    const MechanicalMode mode = emxtest::test_mode11();
    const CapacitorStack s = emxtest::test_stack();

    SECTION("no shift at zero effective bias") {
        OperatingPoint op = emxtest::test_op(3.7);
        op.charge_offset_voltage = 3.7;
        CHECK(anti_spring_frequency(mode, s, op) == mode.omega_m0);
    }
    SECTION("even in the effective bias") {
        OperatingPoint up = emxtest::test_op(12.0), down = emxtest::test_op(-12.0);
        CHECK(anti_spring_frequency(mode, s, up) == anti_spring_frequency(mode, s, down));
    }
    SECTION("frozen 49 V value, kHz-scale downward shift") {
        const double w = anti_spring_frequency(mode, s, emxtest::test_op(49.0));
        CHECK_THAT(w, WithinRel(1.50454509302226952e7, 1e-12));
        const double shift_hz = rad_to_hz(mode.omega_m0 - w);
        CHECK_THAT(shift_hz, WithinRel(5.44211340850319605e3, 1e-9));
    }
    SECTION("pull-in rejected") {
        CHECK_THROWS_AS(anti_spring_frequency(mode, s, emxtest::test_op(2000.0)), domain_error);
    }
}

TEST_CASE("bias-dependent damping") {
    const MechanicalMode mode = emxtest::test_mode11();

    SECTION("lossless bias line") {
        const CapacitorStack s = emxtest::test_stack();
        CHECK(bias_damping(mode, s, emxtest::test_op(49.0)) == mode.gamma_m0);
        CHECK(bias_damping(mode, s, emxtest::test_op(0.0)) == mode.gamma_m0);
    }
    SECTION("frozen 1700 ohm add-on at 49 V") {
        CapacitorStack s = emxtest::test_stack();
        s.bias_resistance = 1700.0;
        const double add = bias_damping(mode, s, emxtest::test_op(49.0)) - mode.gamma_m0;
        CHECK_THAT(add, WithinRel(2.62372638395988942e1, 1e-12));
        OperatingPoint op = emxtest::test_op(5.0);
        op.charge_offset_voltage = 5.0;
        CHECK(bias_damping(mode, s, op) == mode.gamma_m0);
    }
}

TEST_CASE("mechanical susceptibility") {
    const MechanicalMode mode = emxtest::test_mode11();
    const CapacitorStack s = emxtest::test_stack();
    const OperatingPoint op = emxtest::test_op(0.0);

    SECTION("static compliance is real") {
        const auto chi = mechanical_susceptibility(mode, s, op, 0.0);
        CHECK_THAT(chi.real(), WithinRel(1.0 / (mode.m_eff * mode.omega_m0 * mode.omega_m0),
                                         1e-12));
        CHECK_THAT(chi.imag(), WithinAbs(0.0, 1e-30));
    }
    SECTION("resonant response is imaginary") {
        const auto chi = mechanical_susceptibility(mode, s, op, mode.omega_m0);
        CHECK_THAT(std::abs(chi),
                   WithinRel(1.0 / (mode.m_eff * mode.omega_m0 * mode.gamma_m0), 1e-12));
        CHECK_THAT(chi.real(), WithinAbs(0.0, 1e-30));
    }
    SECTION("|chi|^2 full width at half maximum equals the linewidth") {
        // Numeric scan oracle.
        const double peak = std::norm(mechanical_susceptibility(mode, s, op, mode.omega_m0));
        auto half_crossing = [&](double lo, double hi) {
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double v = std::norm(mechanical_susceptibility(mode, s, op, mid));
                (v > 0.5 * peak ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        };
        const double upper = half_crossing(mode.omega_m0, mode.omega_m0 * 1.001);
        double lo = mode.omega_m0 * 0.999, hi = mode.omega_m0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double v = std::norm(mechanical_susceptibility(mode, s, op, mid));
            (v > 0.5 * peak ? hi : lo) = mid;
        }
        const double lower = 0.5 * (lo + hi);
        CHECK_THAT(upper - lower, WithinRel(mode.gamma_m0, 1e-3));
    }
}

TEST_CASE("cavity response") {
    const MicrowaveCavity c = emxtest::test_cavity();
    const double kappa = cavity_linewidth(c);
    OperatingPoint op = emxtest::test_op();

    SECTION("resonant sideband response") {
        CHECK_THAT(std::abs(cavity_response(c, op, -op.pump_detuning)),
                   WithinRel(2.0 / kappa, 1e-12));
    }
    SECTION("decays far away") {
        CHECK(std::abs(cavity_response(c, op, 1e3 * kappa)) < 1e-2 / kappa);
    }
    SECTION("half width of |A|^2 equals kappa/2 by scan") {
        const double peak = std::norm(cavity_response(c, op, -op.pump_detuning));
        double lo = -op.pump_detuning, hi = -op.pump_detuning + 2.0 * kappa;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (std::norm(cavity_response(c, op, mid)) > 0.5 * peak ? lo : hi) = mid;
        }
        CHECK_THAT(0.5 * (lo + hi) + op.pump_detuning, WithinRel(0.5 * kappa, 1e-9));
    }
}

TEST_CASE("electrostatic gain") {
    const MechanicalMode mode = emxtest::test_mode11();
    const CapacitorStack s = emxtest::test_stack();

    SECTION("vanishes at zero effective bias") {
        OperatingPoint op = emxtest::test_op(1.3);
        op.charge_offset_voltage = 1.3;
        CHECK(electrostatic_gain(mode, s, op, mode.omega_m0) == 0.0);
    }
    SECTION("linear in the bias lever at fixed susceptibility") {
        const double w = mode.omega_m0 * 0.98;
        const OperatingPoint op1 = emxtest::test_op(3.0), op2 = emxtest::test_op(6.0);
        const double g1 = electrostatic_gain(mode, s, op1, w);
        const double g2 = electrostatic_gain(mode, s, op2, w);
        const double chi1 = std::abs(mechanical_susceptibility(mode, s, op1, w));
        const double chi2 = std::abs(mechanical_susceptibility(mode, s, op2, w));
        CHECK_THAT(g2 / chi2, WithinRel(2.0 * g1 / chi1, 1e-12));
        CHECK_THAT(g2, WithinRel(2.0 * g1, 5e-3));  // anti-spring shift is tiny here
    }
    SECTION("frozen resonant value at 49 V") {
        const OperatingPoint op = emxtest::test_op(49.0);
        const double w_res = anti_spring_frequency(mode, s, op);
        CHECK_THAT(electrostatic_gain(mode, s, op, w_res),
                   WithinRel(5.90635733556286182e-6, 1e-12));
    }
}

TEST_CASE("photon number") {
    const CapacitorStack s = emxtest::test_stack();
    const MicrowaveCavity c = emxtest::test_cavity();

    SECTION("dark cavity") {
        OperatingPoint op = emxtest::test_op();
        op.pump_power = 0.0;
        CHECK(photon_number(c, s, op) == 0.0);
    }
    SECTION("zero-detuning closed form") {
        OperatingPoint op = emxtest::test_op();
        op.pump_detuning = 0.0;
        const double kappa = cavity_linewidth(c);
        const double wc = cavity_frequency(c, s, 0.0);
        const double expected =
            4.0 * op.pump_power * c.kappa_c / (codata().reduced_planck * wc * kappa * kappa);
        CHECK_THAT(photon_number(c, s, op), WithinRel(expected, 1e-12));
    }
    SECTION("frozen red-detuned value") {
        CHECK_THAT(photon_number(c, s, emxtest::test_op()),
                   WithinRel(1.87008398828564718e5, 1e-12));
    }
}

TEST_CASE("vacuum coupling") {
    const MechanicalMode mode = emxtest::test_mode11();
    const CapacitorStack s = emxtest::test_stack();
    const MicrowaveCavity c = emxtest::test_cavity();

    SECTION("frozen zero-point motion") {
        CHECK_THAT(vacuum_coupling(mode, c, s).x_zpf,
                   WithinRel(7.47975751658995209e-16, 1e-12));
    }
    SECTION("mass scaling") {
        MechanicalMode heavy = mode;
        heavy.m_eff *= 2.0;
        CHECK_THAT(vacuum_coupling(heavy, c, s).x_zpf,
                   WithinRel(vacuum_coupling(mode, c, s).x_zpf / std::sqrt(2.0), 1e-12));
    }
    SECTION("g0 = |G| x_zpf") {
        const auto vc = vacuum_coupling(mode, c, s);
        CHECK_THAT(vc.g0, WithinRel(std::abs(frequency_pull(c, s, 0.0)) * vc.x_zpf, 1e-12));
    }
}

TEST_CASE("cooperativity and cold damping") {
    const MechanicalMode mode = emxtest::test_mode11();
    const MicrowaveCavity c = emxtest::test_cavity();

    SECTION("dark cavity gives zero") { CHECK(cooperativity(mode, c, 1.0, 0.0) == 0.0); }
    SECTION("linear in the photon number") {
        CHECK_THAT(cooperativity(mode, c, 1.8, 2e5),
                   WithinRel(2.0 * cooperativity(mode, c, 1.8, 1e5), 1e-12));
    }
    SECTION("zero linewidth rejected") {
        MechanicalMode frozen = mode;
        frozen.gamma_m0 = 0.0;
        CHECK_THROWS_AS(cooperativity(frozen, c, 1.0, 1e5), domain_error);
    }
    SECTION("published linewidth pairs within 1%") {
        CHECK_THAT(cold_damped_linewidth(hz_to_rad(89.0), 0.28),
                   WithinRel(hz_to_rad(114.0), 0.01));
        CHECK_THAT(cold_damped_linewidth(hz_to_rad(16.0), 0.5),
                   WithinRel(hz_to_rad(24.0), 0.01));
        CHECK(cold_damped_linewidth(mode, 0.0) == mode.gamma_m0);
    }
}

TEST_CASE("electromechanical and total gain") {
    const MechanicalMode mode = emxtest::test_mode11();
    const CapacitorStack s = emxtest::test_stack();
    const MicrowaveCavity c = emxtest::test_cavity();
    const double g0 = hz_to_rad(0.29);

    SECTION("no pump, no gain") {
        OperatingPoint op = emxtest::test_op();
        op.pump_power = 0.0;
        CHECK(electromechanical_gain(mode, c, s, op, mode.omega_m0, g0) == 0.0);
    }
    SECTION("four times the pump doubles the gain") {
        OperatingPoint op = emxtest::test_op();
        OperatingPoint op4 = op;
        op4.pump_power *= 4.0;
        CHECK_THAT(electromechanical_gain(mode, c, s, op4, mode.omega_m0, g0),
                   WithinRel(2.0 * electromechanical_gain(mode, c, s, op, mode.omega_m0, g0),
                             1e-12));
    }
    SECTION("frozen resonant values") {
        const OperatingPoint op = emxtest::test_op(49.0);
        CHECK_THAT(electromechanical_gain(mode, c, s, op, mode.omega_m0, g0),
                   WithinRel(3.48420390138152343e3, 1e-12));
        const double w_res = anti_spring_frequency(mode, s, op);
        CHECK_THAT(total_gain(mode, c, s, op, w_res, g0),
                   WithinRel(2.05782744472432742e-2, 1e-12));
    }
    SECTION("product definition is exact") {
        const OperatingPoint op = emxtest::test_op(20.0);
        const double w = mode.omega_m0 * 1.0001;
        CHECK(total_gain(mode, c, s, op, w, g0) ==
              electromechanical_gain(mode, c, s, op, w, g0) *
                  electrostatic_gain(mode, s, op, w));
    }
    SECTION("zero effective bias kills the cascade") {
        OperatingPoint op = emxtest::test_op(7.0);
        op.charge_offset_voltage = 7.0;
        CHECK(total_gain(mode, c, s, op, mode.omega_m0, g0) == 0.0);
    }
    SECTION("closed form rejects a zero linewidth") {
        CHECK_THROWS_AS(total_gain_resonant(0.1, 1.0, 2.0, 50.0, 1e10, 1e7, 1e-12, 0.0, 1e-7),
                        domain_error);
    }
}

TEST_CASE("force noise budget") {
    const auto sys = emxtest::test_system(49.0);

    SECTION("frozen thermal scale") {
        MechanicalMode m;
        m.omega_m0 = hz_to_rad(4e6);
        m.gamma_m0 = hz_to_rad(0.01);
        m.m_eff = 1e-12;
        CapacitorStack s = emxtest::test_stack();
        OperatingPoint op;
        op.temperature = 0.01;
        const auto b = force_noise_budget(m, sys.cavity, s, op, m.omega_m0, BudgetOptions{false});
        CHECK_THAT(std::sqrt(b.thermal), WithinRel(1.31718438429645748e-19, 1e-12));
    }
    SECTION("only the detector channel survives a cold, quiet input") {
        OperatingPoint op = sys.op;
        op.temperature = 0.0;
        op.rf_noise_psd = 0.0;
        op.detector_psd = 1e-19;
        const auto b = force_noise_budget(sys.mode, sys.cavity, sys.stack, op, 0.0,
                                          BudgetOptions{true}, sys.g0_override);
        CHECK(b.thermal == 0.0);
        CHECK(b.electrical == 0.0);
        CHECK(b.backaction > 0.0);  // pump is on; vanishes with it
        OperatingPoint dark = op;
        dark.pump_power = 0.0;
        dark.detector_psd = 0.0;
        const auto b2 = force_noise_budget(sys.mode, sys.cavity, sys.stack, dark, 0.0,
                                           BudgetOptions{true}, sys.g0_override);
        CHECK(b2.total() == 0.0);
        CHECK(b.detector_equivalent > 0.0);
    }
    SECTION("electrical channel is even and quadratic in the bias") {
        OperatingPoint op = sys.op;
        op.rf_noise_psd = 1e-18;
        op.bias_voltage = 10.0;
        const auto b1 = force_noise_budget(sys.mode, sys.cavity, sys.stack, op, 0.0,
                                           BudgetOptions{true}, sys.g0_override);
        op.bias_voltage = -10.0;
        const auto b1n = force_noise_budget(sys.mode, sys.cavity, sys.stack, op, 0.0,
                                            BudgetOptions{true}, sys.g0_override);
        op.bias_voltage = 20.0;
        const auto b2 = force_noise_budget(sys.mode, sys.cavity, sys.stack, op, 0.0,
                                           BudgetOptions{true}, sys.g0_override);
        CHECK(b1.electrical == b1n.electrical);
        CHECK_THAT(b2.electrical, WithinRel(4.0 * b1.electrical, 1e-12));
    }
    SECTION("cold-damping accounting widens the thermal channel") {
        const auto on = force_noise_budget(sys.mode, sys.cavity, sys.stack, sys.op, 0.0,
                                           BudgetOptions{true}, sys.g0_override);
        const auto off = force_noise_budget(sys.mode, sys.cavity, sys.stack, sys.op, 0.0,
                                            BudgetOptions{false}, sys.g0_override);
        CHECK(on.thermal > off.thermal);
        CHECK(on.backaction == off.backaction);
    }
}

TEST_CASE("sideband area") {
    auto sys = emxtest::test_system(0.0);
    sys.op.rf_noise_psd = 7.8e-9 * 7.8e-9;

    SECTION("thermal part is linear in temperature") {
        OperatingPoint op = sys.op;
        op.bias_voltage = 0.0;
        op.temperature = 0.01;
        const double a1 = sideband_area(sys.mode, sys.stack, op, 1.0);
        op.temperature = 0.5;
        const double a2 = sideband_area(sys.mode, sys.stack, op, 1.0);
        CHECK_THAT(a2, WithinRel(50.0 * a1, 1e-12));
        CHECK_THAT(a1, WithinRel(4.85725662759062506e-29, 1e-12));
    }
    SECTION("frozen parabola coefficient") {
        OperatingPoint op = sys.op;
        op.temperature = 0.0;
        op.bias_voltage = 0.01;
        const double coeff =
            sideband_area(sys.mode, sys.stack, op, 1.0, sys.mode.gamma_m0) / (0.01 * 0.01);
        CHECK_THAT(coeff, WithinRel(1.23019671410461723e-28, 1e-6));
    }
    SECTION("zero linewidth rejected") {
        MechanicalMode m = sys.mode;
        m.gamma_m0 = 0.0;
        CHECK_THROWS_AS(sideband_area(m, sys.stack, sys.op, 1.0), domain_error);
    }
}

TEST_CASE("snr and sensitivity") {
    const auto sys = emxtest::test_system(49.0);

    SECTION("no drive, no signal") {
        OperatingPoint op = sys.op;
        op.rf_drive_psd = 0.0;
        op.detector_psd = 1e-19;
        CHECK(snr(sys.mode, sys.cavity, sys.stack, op, sys.g0_override) == 0.0);
    }
    SECTION("electrical-noise-dominated saturation") {
        OperatingPoint op = sys.op;
        op.temperature = 0.0;
        op.detector_psd = 0.0;
        op.pump_power = 0.0;  // kills back-action; gain cancels anyway
        op.rf_drive_psd = dbm_to_v2_per_hz(-70.3, 50.0);
        op.rf_noise_psd = 7.8e-9 * 7.8e-9;
        CHECK_THAT(snr(sys.mode, sys.cavity, sys.stack, op, sys.g0_override),
                   WithinRel(8.75770676288361367e3, 1e-12));
    }
    SECTION("all channels dark is a domain error") {
        OperatingPoint op = sys.op;
        op.temperature = 0.0;
        op.detector_psd = 0.0;
        op.pump_power = 0.0;
        op.rf_noise_psd = 0.0;
        op.rf_drive_psd = 1e-18;
        CHECK_THROWS_AS(snr(sys.mode, sys.cavity, sys.stack, op, sys.g0_override), domain_error);
    }
    SECTION("temperature scaling of the ultimate sensitivity") {
        OperatingPoint op = sys.op;
        const auto s1 = min_sensitivity(sys.mode, sys.stack, op);
        op.temperature *= 0.5;
        const auto s2 = min_sensitivity(sys.mode, sys.stack, op);
        CHECK_THAT(s2.voltage, WithinRel(s1.voltage / std::sqrt(2.0), 1e-12));
    }
    SECTION("zero effective bias rejected") {
        OperatingPoint op = sys.op;
        op.bias_voltage = op.charge_offset_voltage;
        CHECK_THROWS_AS(min_sensitivity(sys.mode, sys.stack, op), domain_error);
    }
    SECTION("published charge conversions at C_eq = 15 fF") {
        CHECK_THAT(charge_from_voltage_sensitivity(0.9e-9, 15e-15) * 1e6,
                   WithinRel(8.42603725052202952e1, 1e-12));
        CHECK_THAT(charge_from_voltage_sensitivity(0.9e-9, 15e-15) * 1e6, WithinRel(87.0, 0.05));
        CHECK_THAT(charge_from_voltage_sensitivity(7.8e-9, 15e-15) * 1e6,
                   WithinRel(730.256561711909225, 1e-12));
        CHECK_THAT(charge_from_voltage_sensitivity(7.8e-9, 15e-15) * 1e6,
                   WithinRel(760.0, 0.05));
    }
}

TEST_CASE("sideband spectrum") {
    auto sys = emxtest::test_system(0.0);
    sys.op.detector_psd = 1e-24;

    auto grid = [&](double center, double halfspan, std::size_t n) {
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i)
            w[i] = center - halfspan + 2.0 * halfspan * static_cast<double>(i) / (n - 1);
        return w;
    };

    SECTION("everything off leaves the detection floor") {
        OperatingPoint op = sys.op;
        op.temperature = 0.0;
        op.rf_noise_psd = 0.0;
        op.pump_power = 0.0;
        const auto spec = sideband_spectrum(sys.mode, sys.cavity, sys.stack, op,
                                            grid(sys.mode.omega_m0, hz_to_rad(2e3), 101),
                                            sys.g0_override);
        for (double v : spec) CHECK(v == op.detector_psd);
    }
    SECTION("peak-to-floor ratio matches the closed forms") {
        const auto b = force_noise_budget(sys.mode, sys.cavity, sys.stack, sys.op,
                                          sys.mode.omega_m0, BudgetOptions{false},
                                          sys.g0_override);
        const auto bres = force_noise_budget(sys.mode, sys.cavity, sys.stack, sys.op, 0.0,
                                             BudgetOptions{false}, sys.g0_override);
        const double expected = (b.thermal + b.backaction) / bres.detector_equivalent;
        const auto d = evaluate(sys);
        const auto spec = sideband_spectrum(sys.mode, sys.cavity, sys.stack, sys.op,
                                            grid(d.omega_m_v, hz_to_rad(50e3), 40001),
                                            sys.g0_override);
        const double peak = *std::max_element(spec.begin(), spec.end());
        CHECK_THAT(peak / sys.op.detector_psd - 1.0, WithinRel(expected, 1e-2));
    }
    SECTION("resonance sits at the shifted frequency within one grid step") {
        auto sys49 = emxtest::test_system(49.0);
        sys49.op.detector_psd = 0.0;
        const auto d = evaluate(sys49);
        const auto w = grid(sys49.mode.omega_m0, hz_to_rad(12e3), 4001);
        const auto spec = sideband_spectrum(sys49.mode, sys49.cavity, sys49.stack, sys49.op, w,
                                            sys49.g0_override);
        const auto it = std::max_element(spec.begin(), spec.end());
        const double w_peak = w[static_cast<std::size_t>(it - spec.begin())];
        CHECK(std::abs(w_peak - d.omega_m_v) <= (w[1] - w[0]));
    }
    SECTION("quadrature of the peak matches the closed-form area") {
        const auto d = evaluate(sys);
        // Lorentzian tails hold 1/(pi N) of the area beyond +-N half-widths,
        // so a 1% match needs a grid well past the minimum twenty linewidths.
        const double span = 100.0 * d.gamma_em;
        const auto w = grid(d.omega_m_v, span, 20001);
        const auto spec = sideband_spectrum(sys.mode, sys.cavity, sys.stack, sys.op, w,
                                            sys.g0_override);
        double integral = 0.0;
        for (std::size_t i = 1; i < w.size(); ++i)
            integral += 0.5 * (spec[i] + spec[i - 1] - 2.0 * sys.op.detector_psd) *
                        (w[i] - w[i - 1]) / two_pi;
        const double area = sideband_area(sys.mode, sys.stack, sys.op, d.gain_em, d.gamma_em);
        CHECK_THAT(integral, WithinRel(area, 0.01));
    }
}

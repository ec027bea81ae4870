#pragma once

#include <cmath>

#include "emx/errors.hpp"
#include "emx/model.hpp"
#include "emx/system.hpp"
#include "emx/units.hpp"

namespace emx::reference {

// Published characterization of the flip-chip device and its two drum
// modes. The under-determined circuit parameters (effective electrode
// area, bias capacitor, detection floor, effective pump power) are
// calibrated here from the published anchors: C_eq = 15 fF, the mode-11
// thermal-limited sensitivity of 0.1 nV/rtHz at 49 V and 10 mK, the
// measured cooperativities, the peak SNR values and the thermalization
// slopes. Everything downstream (synthetic datasets, fits, the
// reproduction suite) evaluates these calibrated systems through the
// ordinary model path.

struct ModeAnchors {
    double f_m0_hz = 0.0;        // zero-bias mode frequency
    double gamma_m_hz = 0.0;     // intrinsic linewidth
    double m_eff_kg = 0.0;       // calibrated motional mass
    double g0_hz = 0.0;          // measured vacuum coupling
    double cooperativity = 0.0;  // at the working pump power
    double snr_db = 0.0;         // bias-sweep SNR at 49 V
    double drive_dbm = 0.0;      // rf drive strength at the device
    double sqrt_s_vv_n = 0.0;    // bias-line noise, V/rtHz
    double slope_v2_per_k = 0.0; // thermalization slope at the analyzer
};

inline ModeAnchors mode11_anchors() {
    // The bias-line noise at this mode frequency is unresolved in the SNR
    // sweep; 0.1 nV/rtHz keeps 49 V an order of magnitude short of
    // saturation, matching the observed linear-only response.
    return {2.4e6, 89.0, 6.25e-12, 0.29, 0.28, 96.8, -70.4, 0.1e-9, 3.57e-10};
}

inline ModeAnchors mode12_anchors() {
    return {3.6e6, 16.0, 4.27e-12, 0.23, 0.5, 78.7, -70.0, 7.8e-9, 9.8e-11};
}

inline constexpr double device_gap = 1.5e-6;         // from the anti-spring fits
inline constexpr double device_c_eq = 15e-15;        // bias-circuit capacitance
inline constexpr double device_participation = 0.22; // C_m / (C_m + 4 C_s)
inline constexpr double device_f_c_hz = 6.21e9;      // resonance after assembly
inline constexpr double device_kappa_hz = 1.34e6;    // total cavity linewidth
inline constexpr double device_kappa_c_hz = 0.3e6;   // read-out coupling share
inline constexpr double device_temperature = 0.01;   // K
inline constexpr double device_bias = 49.0;          // V
inline constexpr double ideal_sens_11 = 0.1e-9;      // V/rtHz, calibrates dC_eq/dx

/// Stack solved from C_eq, the gap, and the mode-11 sensitivity anchor:
/// eta = dC_eq d / C_eq, C_m = C_eq / eta, A = C_m d / eps0,
/// C_b = eta C_m / (1 - eta).
inline CapacitorStack device_stack(const PhysicalConstants& pc = codata()) {
    const auto a = mode11_anchors();
    const double gamma = hz_to_rad(a.gamma_m_hz);
    const double dceq = std::sqrt(2.0 * a.m_eff_kg * gamma * pc.boltzmann * device_temperature) /
                        (device_bias * ideal_sens_11);
    const double eta = dceq * device_gap / device_c_eq;
    const double c_m = device_c_eq / eta;
    CapacitorStack s;
    s.gap = device_gap;
    s.membrane_cap_area = c_m * device_gap / pc.vacuum_permittivity;
    s.bias_cap = eta * c_m / (1.0 - eta);
    s.stray_cap = c_m * (1.0 / device_participation - 1.0) / 4.0;
    s.bias_resistance = 0.0;  // the bias-line filter sits behind the low-pass
    s.vacuum_permittivity = pc.vacuum_permittivity;
    return s;
}

inline MicrowaveCavity device_cavity(const CapacitorStack& s,
                                     const PhysicalConstants& pc = codata()) {
    (void)pc;
    MicrowaveCavity c;
    const double wc = hz_to_rad(device_f_c_hz);
    const double c_m = s.vacuum_permittivity * s.membrane_cap_area / s.gap;
    c.inductance = 1.0 / (wc * wc * (0.25 * c_m + s.stray_cap));
    c.kappa_c = hz_to_rad(device_kappa_c_hz);
    c.kappa_i = hz_to_rad(device_kappa_hz - device_kappa_c_hz);
    c.line_impedance = 50.0;
    return c;
}

namespace detail {

/// Pump power that realizes the anchored cooperativity through the standard
/// input-output photon number at Delta = -W_m.
inline double pump_power_for_cooperativity(const ModeAnchors& a, const MicrowaveCavity& cavity,
                                           const CapacitorStack& stack,
                                           const PhysicalConstants& pc) {
    const double kappa = cavity_linewidth(cavity);
    const double g0 = hz_to_rad(a.g0_hz);
    const double gamma = hz_to_rad(a.gamma_m_hz);
    const double n = a.cooperativity * kappa * gamma / (4.0 * g0 * g0);
    const double omega_m = hz_to_rad(a.f_m0_hz);
    const double wc = cavity_frequency(cavity, stack, 0.0);
    const double wd = wc - omega_m;
    return n * (omega_m * omega_m + 0.25 * kappa * kappa) * pc.reduced_planck * wd /
           cavity.kappa_c;
}

/// Detection floor that puts the modelled bias-sweep SNR at the anchored
/// value at 49 V.
inline double detector_psd_for_snr(SystemParams sys, const ModeAnchors& a) {
    sys.op.detector_psd = 0.0;
    const auto b = emx::detail::bias_state(sys.mode, sys.cavity, sys.stack, sys.op,
                                           sys.g0_override, sys.constants);
    const NoiseBudget known = force_noise_budget(sys.mode, sys.cavity, sys.stack, sys.op,
                                                 b.omega, BudgetOptions{true}, sys.g0_override,
                                                 sys.constants);
    const double snr_target = std::pow(10.0, a.snr_db / 20.0);
    const double needed_total =
        b.v_dceq * b.v_dceq * sys.op.rf_drive_psd / (snr_target * snr_target);
    const double s_ff_det = needed_total - known.total();
    if (!(s_ff_det > 0.0))
        throw domain_error("reference", "SNR anchor inconsistent with the other noise channels");
    const double gem = electromechanical_gain(sys.mode, sys.cavity, sys.stack, sys.op, b.omega,
                                              sys.g0_override, sys.constants);
    const double chi = std::abs(susceptibility(sys.mode.m_eff, b.omega_sq, b.gamma_em, b.omega));
    return s_ff_det * gem * gem * chi * chi;
}

inline SystemParams device_mode(const ModeAnchors& a) {
    SystemParams sys;
    sys.constants = codata();
    sys.stack = device_stack(sys.constants);
    sys.cavity = device_cavity(sys.stack, sys.constants);
    sys.mode.index_p = 1;
    sys.mode.index_q = a.f_m0_hz > 3e6 ? 2 : 1;
    sys.mode.omega_m0 = hz_to_rad(a.f_m0_hz);
    sys.mode.gamma_m0 = hz_to_rad(a.gamma_m_hz);
    sys.mode.m_eff = a.m_eff_kg;
    sys.g0_override = hz_to_rad(a.g0_hz);

    sys.op.bias_voltage = device_bias;
    sys.op.charge_offset_voltage = 0.0;
    sys.op.temperature = device_temperature;
    sys.op.pump_detuning = -sys.mode.omega_m0;
    sys.op.pump_power = pump_power_for_cooperativity(a, sys.cavity, sys.stack, sys.constants);
    sys.op.rf_drive_psd = dbm_to_v2_per_hz(a.drive_dbm, sys.cavity.line_impedance);
    sys.op.rf_noise_psd = a.sqrt_s_vv_n * a.sqrt_s_vv_n;
    sys.op.rf_frequency = anti_spring_frequency(sys.mode, sys.stack, sys.op);
    sys.op.detector_psd = detector_psd_for_snr(sys, a);
    return sys;
}

}  // namespace detail

inline SystemParams device_mode11() { return detail::device_mode(mode11_anchors()); }
inline SystemParams device_mode12() { return detail::device_mode(mode12_anchors()); }

/// Analyzer chain gain (V per m) that puts the thermalization slope at the
/// published value for this mode.
inline double chain_gain(const SystemParams& sys, const ModeAnchors& a) {
    OperatingPoint op = sys.op;
    op.bias_voltage = op.charge_offset_voltage;  // thermalization runs at zero lever
    op.temperature = 1.0;
    const auto b = emx::detail::bias_state(sys.mode, sys.cavity, sys.stack, op, sys.g0_override,
                                           sys.constants);
    const double unit_slope =
        sideband_area(sys.mode, sys.stack, op, 1.0, b.gamma_em, sys.constants);
    return std::sqrt(a.slope_v2_per_k / unit_slope);
}

/// Full-system flavor of the published forward-looking design point, usable
/// as a predict/sweep configuration: 500 nm gap sized for a 15 nF/m lever,
/// a 6 GHz resonator, and the pump set for cooperativity 0.1 with the
/// geometric coupling.
inline SystemParams projection_system(const PhysicalConstants& pc = codata()) {
    SystemParams sys;
    sys.constants = pc;
    sys.stack.gap = 500e-9;
    sys.stack.membrane_cap_area = 15e-9 * sys.stack.gap * sys.stack.gap / pc.vacuum_permittivity;
    sys.stack.bias_cap = 1e-9;  // large: eta ~ 1
    sys.stack.stray_cap = 2e-14;
    sys.stack.vacuum_permittivity = pc.vacuum_permittivity;

    const double wc = hz_to_rad(6e9);
    const double c_m = membrane_capacitance(sys.stack, 0.0);
    sys.cavity.inductance = 1.0 / (wc * wc * (0.25 * c_m + sys.stack.stray_cap));
    sys.cavity.kappa_c = hz_to_rad(0.5e6);
    sys.cavity.kappa_i = hz_to_rad(1.0e6);
    sys.cavity.line_impedance = 50.0;

    sys.mode.omega_m0 = hz_to_rad(4e6);
    sys.mode.gamma_m0 = hz_to_rad(10e-3);  // Q = 4e8
    sys.mode.m_eff = 1e-12;
    sys.g0_override = 0.0;  // geometric coupling

    sys.op.bias_voltage = 50.0;
    sys.op.temperature = 10e-3;
    sys.op.pump_detuning = -sys.mode.omega_m0;
    const double g0 = vacuum_coupling(sys.mode, sys.cavity, sys.stack, pc).g0;
    const double kappa = cavity_linewidth(sys.cavity);
    const double n = 0.1 * kappa * sys.mode.gamma_m0 / (4.0 * g0 * g0);
    const double wd = cavity_frequency(sys.cavity, sys.stack, 0.0) + sys.op.pump_detuning;
    sys.op.pump_power = n * (sys.mode.omega_m0 * sys.mode.omega_m0 + 0.25 * kappa * kappa) *
                        pc.reduced_planck * wd / sys.cavity.kappa_c;
    sys.op.detector_psd = 4.5e-10 * 4.5e-10;  // HEMT-class floor
    return sys;
}

}  // namespace emx::reference

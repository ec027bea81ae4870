#pragma once

#include <cmath>
#include <functional>

#include "emx/system.hpp"
#include "emx/units.hpp"

namespace emxtest {

// Canonical device-scale fixture used across the suite: 1.5 um gap,
// 15 fF-class equivalent capacitance, 6.2 GHz resonator, 2.4 MHz drum mode.
inline emx::CapacitorStack test_stack() {
    emx::CapacitorStack s;
    s.gap = 1.5e-6;
    s.membrane_cap_area = 4.0e-9;
    s.stray_cap = 2.1e-14;
    s.bias_cap = 4.1e-14;
    s.bias_resistance = 0.0;
    return s;
}

inline emx::MicrowaveCavity test_cavity() {
    emx::MicrowaveCavity c;
    c.inductance = 2.4428e-8;
    c.kappa_c = emx::hz_to_rad(0.3e6);
    c.kappa_i = emx::hz_to_rad(1.04e6);
    c.line_impedance = 50.0;
    return c;
}

inline emx::MechanicalMode test_mode11() {
    emx::MechanicalMode m;
    m.index_p = 1;
    m.index_q = 1;
    m.omega_m0 = emx::hz_to_rad(2.4e6);
    m.gamma_m0 = emx::hz_to_rad(89.0);
    m.m_eff = 6.25e-12;
    return m;
}

inline emx::OperatingPoint test_op(double bias = 49.0) {
    emx::OperatingPoint op;
    op.bias_voltage = bias;
    op.charge_offset_voltage = 0.0;
    op.pump_power = emx::dbm_to_watt(-70.0);  // -30 dBm source, 40 dB line
    op.pump_detuning = -emx::hz_to_rad(2.4e6);
    op.temperature = 0.01;
    op.rf_frequency = emx::hz_to_rad(2.4e6);
    return op;
}

inline emx::SystemParams test_system(double bias = 49.0) {
    emx::SystemParams sys;
    sys.mode = test_mode11();
    sys.stack = test_stack();
    sys.cavity = test_cavity();
    sys.op = test_op(bias);
    sys.g0_override = emx::hz_to_rad(0.29);
    return sys;
}

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace emxtest

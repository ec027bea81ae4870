#pragma once

#include <cmath>

#include "emx/constants.hpp"
#include "emx/errors.hpp"

namespace emx {

/// The vacuum-gap / bias capacitor network. The membrane capacitance C_m(x)
/// follows the parallel-plate model eps0 * A / (gap - x); the bias capacitor
/// C_b sits in series on the bias line, the stray capacitance C_s in parallel
/// on the resonator side (which sees C_m/4).
struct CapacitorStack {
    double gap = 0.0;                // m, membrane to circuit electrode
    double membrane_cap_area = 0.0;  // m^2, effective parallel-plate area
    double stray_cap = 0.0;          // F, C_s
    double bias_cap = 0.0;           // F, C_b
    double bias_resistance = 0.0;    // ohm, resistive element of the bias line
    double vacuum_permittivity = 8.8541878128e-12;  // F/m
};

inline void validate(const CapacitorStack& s, const std::string& op = "capacitor_stack") {
    if (!(s.gap > 0.0)) throw domain_error(op, "gap must be positive");
    if (!(s.membrane_cap_area > 0.0)) throw domain_error(op, "capacitor area must be positive");
    if (!(s.stray_cap > 0.0)) throw domain_error(op, "stray capacitance must be positive");
    if (!(s.bias_cap > 0.0)) throw domain_error(op, "bias capacitance must be positive");
    if (s.bias_resistance < 0.0) throw domain_error(op, "bias resistance must be non-negative");
}

namespace detail {
inline void check_displacement(const CapacitorStack& s, double x, const char* op) {
    if (!(std::abs(x) < s.gap))
        throw domain_error(op, "displacement reaches the gap (plates touching)");
}
}  // namespace detail

inline double membrane_capacitance(const CapacitorStack& s, double x) {
    detail::check_displacement(s, x, "membrane_capacitance");
    return s.vacuum_permittivity * s.membrane_cap_area / (s.gap - x);
}

inline double membrane_capacitance_dx(const CapacitorStack& s, double x) {
    detail::check_displacement(s, x, "membrane_capacitance_dx");
    const double d = s.gap - x;
    return s.vacuum_permittivity * s.membrane_cap_area / (d * d);
}

inline double membrane_capacitance_dxx(const CapacitorStack& s, double x) {
    detail::check_displacement(s, x, "membrane_capacitance_dxx");
    const double d = s.gap - x;
    return 2.0 * s.vacuum_permittivity * s.membrane_cap_area / (d * d * d);
}

/// Fraction of the applied bias that drops across the membrane capacitor.
inline double voltage_dilution(const CapacitorStack& s, double x) {
    return s.bias_cap / (s.bias_cap + membrane_capacitance(s, x));
}

inline double equivalent_capacitance(const CapacitorStack& s, double x) {
    const double cm = membrane_capacitance(s, x);
    return cm * s.bias_cap / (cm + s.bias_cap);
}

// d/dx and d2/dx2 of C_eq from the exact series network (chain rule), not
// from the eta shortcut; the shortcut is recovered in the C_b >> C_m limit.
inline double equivalent_capacitance_dx(const CapacitorStack& s, double x) {
    const double eta = voltage_dilution(s, x);
    return eta * eta * membrane_capacitance_dx(s, x);
}

inline double equivalent_capacitance_dxx(const CapacitorStack& s, double x) {
    const double cm = membrane_capacitance(s, x);
    const double dcm = membrane_capacitance_dx(s, x);
    const double d2cm = membrane_capacitance_dxx(s, x);
    const double eta = s.bias_cap / (s.bias_cap + cm);
    return eta * eta * (d2cm - 2.0 * dcm * dcm / (s.bias_cap + cm));
}

/// Lumped LC resonator read out in reflection.
struct MicrowaveCavity {
    double inductance = 0.0;      // H
    double kappa_c = 0.0;         // rad/s, coupling rate to the read-out line
    double kappa_i = 0.0;         // rad/s, intrinsic loss rate
    double line_impedance = 0.0;  // ohm
};

inline void validate(const MicrowaveCavity& c, const std::string& op = "cavity") {
    if (!(c.inductance > 0.0)) throw domain_error(op, "inductance must be positive");
    if (!(c.kappa_c > 0.0) || !(c.kappa_i > 0.0))
        throw domain_error(op, "cavity rates must be positive");
    if (!(c.line_impedance > 0.0)) throw domain_error(op, "line impedance must be positive");
}

inline double cavity_linewidth(const MicrowaveCavity& c) { return c.kappa_c + c.kappa_i; }

/// Resonance frequency w_c(x) = 1 / sqrt(L (C_m(x)/4 + C_s)). The two
/// half-membrane capacitors are in series for the resonator, hence C_m/4.
inline double cavity_frequency(const MicrowaveCavity& c, const CapacitorStack& s, double x) {
    const double ctot = 0.25 * membrane_capacitance(s, x) + s.stray_cap;
    return 1.0 / std::sqrt(c.inductance * ctot);
}

/// Frequency pull G = dw_c/dx = -w_c^3 L dC_m/dx / 8. Negative: pushing the
/// membrane toward the circuit raises C_m and lowers the resonance.
inline double frequency_pull(const MicrowaveCavity& c, const CapacitorStack& s, double x) {
    const double wc = cavity_frequency(c, s, x);
    return -wc * wc * wc * c.inductance * membrane_capacitance_dx(s, x) / 8.0;
}

/// Fraction of the resonator capacitance contributed by the vacuum-gap
/// capacitor, C_m / (C_m + 4 C_s), extracted from the resonance before and
/// after the gap capacitor is added: 1 - (f_after / f_before)^2.
inline double participation_ratio_from_frequencies(double f_before, double f_after) {
    if (!(f_before > 0.0) || !(f_after > 0.0) || f_after > f_before)
        throw domain_error("participation_ratio",
                           "expected 0 < f_after <= f_before");
    const double r = f_after / f_before;
    return 1.0 - r * r;
}

inline double participation_ratio(const CapacitorStack& s, double x = 0.0) {
    const double cm = membrane_capacitance(s, x);
    return cm / (cm + 4.0 * s.stray_cap);
}

}  // namespace emx

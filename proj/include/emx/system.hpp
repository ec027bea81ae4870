#pragma once

#include <optional>
#include <string>

#include "emx/circuit.hpp"
#include "emx/constants.hpp"
#include "emx/errors.hpp"
#include "emx/geometry.hpp"

namespace emx {

/// A membrane drum mode. Frequencies are zero-bias values in rad/s.
struct MechanicalMode {
    int index_p = 1;
    int index_q = 1;
    double omega_m0 = 0.0;  // rad/s
    double gamma_m0 = 0.0;  // rad/s, intrinsic linewidth
    double m_eff = 0.0;     // kg
};

inline void validate(const MechanicalMode& m, const std::string& op = "mode") {
    if (m.index_p < 1 || m.index_q < 1) throw domain_error(op, "mode indices must be >= 1");
    if (!(m.omega_m0 > 0.0)) throw domain_error(op, "mode frequency must be positive");
    if (m.gamma_m0 < 0.0) throw domain_error(op, "mode linewidth must be non-negative");
    if (!(m.m_eff > 0.0)) throw domain_error(op, "effective mass must be positive");
}

inline double quality_factor(const MechanicalMode& m) {
    if (!(m.gamma_m0 > 0.0)) throw domain_error("quality_factor", "zero linewidth");
    return m.omega_m0 / m.gamma_m0;
}

/// Bias, pump, drive and noise settings of one experiment. All spectral
/// densities are single-sided, referred to the device plane.
struct OperatingPoint {
    double bias_voltage = 0.0;           // V
    double charge_offset_voltage = 0.0;  // V, offset V0 from trapped charge
    double pump_power = 0.0;             // W at the device
    double pump_detuning = 0.0;          // rad/s, Delta = w_d - w_c
    double temperature = 0.0;            // K
    double rf_drive_psd = 0.0;           // V^2/Hz at the rf drive frequency
    double rf_noise_psd = 0.0;           // V^2/Hz, white bias-line noise
    double detector_psd = 0.0;           // V^2/Hz, output-referred detection floor
    double rf_frequency = 0.0;           // rad/s, coherent drive frequency
};

inline void validate(const OperatingPoint& o, const std::string& op = "operating_point") {
    if (o.temperature < 0.0) throw domain_error(op, "temperature must be non-negative");
    if (o.pump_power < 0.0) throw domain_error(op, "pump power must be non-negative");
    if (o.rf_drive_psd < 0.0 || o.rf_noise_psd < 0.0 || o.detector_psd < 0.0)
        throw domain_error(op, "spectral densities must be non-negative");
}

inline double effective_bias(const OperatingPoint& o) {
    return o.bias_voltage - o.charge_offset_voltage;
}

/// Per-channel force-noise densities, N^2/Hz, input-referred to the mode.
struct NoiseBudget {
    double thermal = 0.0;
    double electrical = 0.0;
    double backaction = 0.0;
    double detector_equivalent = 0.0;

    double total() const { return thermal + electrical + backaction + detector_equivalent; }
};

/// Everything needed to evaluate the full transduction model at one
/// operating point. The measured vacuum coupling, when available, overrides
/// the geometric estimate (set g0_override to 0 to derive from geometry).
struct SystemParams {
    MechanicalMode mode;
    CapacitorStack stack;
    MicrowaveCavity cavity;
    OperatingPoint op;
    PhysicalConstants constants;
    double g0_override = 0.0;  // rad/s; 0 means use G * x_zpf
    std::optional<MembraneGeometry> geometry;
};

inline void validate(const SystemParams& s) {
    validate(s.mode);
    validate(s.stack);
    validate(s.cavity);
    validate(s.op);
    if (s.g0_override < 0.0) throw domain_error("system", "g0 override must be non-negative");
    if (s.geometry) validate(*s.geometry);
}

}  // namespace emx

#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "emx/constants.hpp"
#include "emx/errors.hpp"
#include "emx/system.hpp"
#include "emx/units.hpp"

namespace emx {

// ---------------------------------------------------------------------------
// Bias-dependent mechanics
// ---------------------------------------------------------------------------

/// Squared mode frequency softened by the static electrostatic force
/// gradient: W^2(V) = W0^2 - (V - V0)^2 * d2C_eq/dx2 / (2 m_eff).
inline double anti_spring_frequency_sq(const MechanicalMode& mode, const CapacitorStack& stack,
                                       const OperatingPoint& op) {
    const double v = effective_bias(op);
    return mode.omega_m0 * mode.omega_m0 -
           v * v * equivalent_capacitance_dxx(stack, 0.0) / (2.0 * mode.m_eff);
}

inline double anti_spring_frequency(const MechanicalMode& mode, const CapacitorStack& stack,
                                    const OperatingPoint& op) {
    const double w2 = anti_spring_frequency_sq(mode, stack, op);
    if (!(w2 > 0.0))
        throw domain_error("anti_spring_frequency",
                           "bias beyond pull-in: softened frequency squared is non-positive");
    return std::sqrt(w2);
}

/// Mechanical linewidth including the damping from bias-driven currents in
/// the resistive part of the bias line:
/// Gamma(V) = Gamma0 + (V - V0)^2 * (dC_eq/dx)^2 * R / m_eff.
/// The capacitance derivative enters to first order (motional current
/// i = V dC_eq/dx * xdot dissipated in R); a second-order derivative here
/// would not carry units of rate.
inline double bias_damping(const MechanicalMode& mode, const CapacitorStack& stack,
                           const OperatingPoint& op) {
    const double v = effective_bias(op);
    const double dc = equivalent_capacitance_dx(stack, 0.0);
    return mode.gamma_m0 + v * v * dc * dc * stack.bias_resistance / mode.m_eff;
}

/// chi(w)^-1 = m [W^2 - w^2 - i w Gamma], in m/N.
inline std::complex<double> susceptibility(double m_eff, double omega_sq, double gamma,
                                           double omega) {
    return 1.0 / (m_eff * std::complex<double>(omega_sq - omega * omega, -omega * gamma));
}

/// Voltage-dependent susceptibility at the operating point (bias-shifted
/// frequency and bias-broadened linewidth).
inline std::complex<double> mechanical_susceptibility(const MechanicalMode& mode,
                                                      const CapacitorStack& stack,
                                                      const OperatingPoint& op, double omega) {
    return susceptibility(mode.m_eff, anti_spring_frequency_sq(mode, stack, op),
                          bias_damping(mode, stack, op), omega);
}

// ---------------------------------------------------------------------------
// Microwave side
// ---------------------------------------------------------------------------

/// Resonator response A_-(w) = [-i(Delta + w) + kappa/2]^-1, in seconds.
inline std::complex<double> cavity_response(const MicrowaveCavity& cavity,
                                            const OperatingPoint& op, double omega) {
    const double kappa = cavity_linewidth(cavity);
    return 1.0 / std::complex<double>(0.5 * kappa, -(op.pump_detuning + omega));
}

/// Intracavity photon number from the pump: n = (P/hbar w_d) kappa_c /
/// (Delta^2 + (kappa/2)^2), with w_d = w_c + Delta.
inline double photon_number(const MicrowaveCavity& cavity, const CapacitorStack& stack,
                            const OperatingPoint& op,
                            const PhysicalConstants& pc = codata()) {
    if (op.pump_power == 0.0) return 0.0;
    const double wc = cavity_frequency(cavity, stack, 0.0);
    const double wd = wc + op.pump_detuning;
    const double kappa = cavity_linewidth(cavity);
    const double denom = op.pump_detuning * op.pump_detuning + 0.25 * kappa * kappa;
    return (op.pump_power / (pc.reduced_planck * wd)) * cavity.kappa_c / denom;
}

struct VacuumCoupling {
    double g0 = 0.0;     // rad/s
    double x_zpf = 0.0;  // m
};

/// Geometric estimate g0 = |G| x_zpf with x_zpf = sqrt(hbar / 2 m W).
inline VacuumCoupling vacuum_coupling(const MechanicalMode& mode, const MicrowaveCavity& cavity,
                                      const CapacitorStack& stack,
                                      const PhysicalConstants& pc = codata()) {
    VacuumCoupling v;
    v.x_zpf = std::sqrt(pc.reduced_planck / (2.0 * mode.m_eff * mode.omega_m0));
    v.g0 = std::abs(frequency_pull(cavity, stack, 0.0)) * v.x_zpf;
    return v;
}

inline double cooperativity(double g0, double n_photons, double kappa, double gamma_m) {
    if (!(gamma_m > 0.0))
        throw domain_error("cooperativity", "requires a positive mechanical linewidth");
    return 4.0 * g0 * g0 * n_photons / (kappa * gamma_m);
}

inline double cooperativity(const MechanicalMode& mode, const MicrowaveCavity& cavity, double g0,
                            double n_photons) {
    return cooperativity(g0, n_photons, cavity_linewidth(cavity), mode.gamma_m0);
}

/// Red-detuned operation damps the mode: Gamma_em = Gamma_m (1 + C).
inline double cold_damped_linewidth(double gamma_m, double coop) {
    if (coop < 0.0) throw domain_error("cold_damped_linewidth", "cooperativity must be >= 0");
    return gamma_m * (1.0 + coop);
}

inline double cold_damped_linewidth(const MechanicalMode& mode, double coop) {
    return cold_damped_linewidth(mode.gamma_m0, coop);
}

// ---------------------------------------------------------------------------
// Gains
// ---------------------------------------------------------------------------

/// Electrostatic stage, m/V: Gv(w) = |chi(w, V) (V - V0) dC_eq/dx|.
inline double electrostatic_gain(const MechanicalMode& mode, const CapacitorStack& stack,
                                 const OperatingPoint& op, double omega) {
    return std::abs(mechanical_susceptibility(mode, stack, op, omega)) *
           std::abs(effective_bias(op) * equivalent_capacitance_dx(stack, 0.0));
}

/// Electromechanical stage, output volts per meter of motion (resolved
/// sideband): Gem(w) = G sqrt(n kappa_c) |A_-(w)| sqrt(hbar w_c Z / 2).
/// A measured g0 (rad/s) overrides the geometric frequency pull when given.
inline double electromechanical_gain(const MechanicalMode& mode, const MicrowaveCavity& cavity,
                                     const CapacitorStack& stack, const OperatingPoint& op,
                                     double omega, double g0_override = 0.0,
                                     const PhysicalConstants& pc = codata()) {
    const double n = photon_number(cavity, stack, op, pc);
    if (n == 0.0) return 0.0;
    double pull = std::abs(frequency_pull(cavity, stack, 0.0));
    if (g0_override > 0.0)
        pull = g0_override / vacuum_coupling(mode, cavity, stack, pc).x_zpf;
    const double wc = cavity_frequency(cavity, stack, 0.0);
    return pull * std::sqrt(n * cavity.kappa_c) * std::abs(cavity_response(cavity, op, omega)) *
           std::sqrt(0.5 * pc.reduced_planck * wc * cavity.line_impedance);
}

/// Cascaded gain Gtot(w) = Gem(w) * Gv(w), output volts per drive volt.
inline double total_gain(const MechanicalMode& mode, const MicrowaveCavity& cavity,
                         const CapacitorStack& stack, const OperatingPoint& op, double omega,
                         double g0_override = 0.0, const PhysicalConstants& pc = codata()) {
    return electromechanical_gain(mode, cavity, stack, op, omega, g0_override, pc) *
           electrostatic_gain(mode, stack, op, omega);
}

/// Closed form of the resonant gain at Delta = -W_m:
/// sqrt(C kappa_c Z w_c / (kappa W_m m Gamma_m)) |V dC_eq/dx|.
inline double total_gain_resonant(double coop, double kappa_c, double kappa, double impedance,
                                  double omega_c, double omega_m, double m_eff, double gamma_m,
                                  double v_dceq) {
    if (!(gamma_m > 0.0))
        throw domain_error("total_gain_resonant", "requires a positive mechanical linewidth");
    return std::sqrt(coop * kappa_c * impedance * omega_c / (kappa * omega_m * m_eff * gamma_m)) *
           std::abs(v_dceq);
}

// ---------------------------------------------------------------------------
// Noise, spectra, SNR, sensitivity
// ---------------------------------------------------------------------------

struct BudgetOptions {
    /// Use the cold-damped linewidth in the thermal channel, the convention
    /// the on-resonance SNR bookkeeping is written in. The displayed
    /// spectrum and the peak/floor extraction keep the bare Gamma_m(V).
    bool cold_damping_accounting = true;
};

namespace detail {

struct BiasState {
    double omega_sq = 0.0;   // W_m^2(V)
    double omega = 0.0;      // W_m(V)
    double gamma_m = 0.0;    // Gamma_m(V)
    double gamma_em = 0.0;   // Gamma_m(V) + 4 g0^2 n / kappa
    double n = 0.0;          // photons
    double g0 = 0.0;         // rad/s actually used
    double v_dceq = 0.0;     // (V - V0) dC_eq/dx, N per volt of drive
};

inline BiasState bias_state(const MechanicalMode& mode, const MicrowaveCavity& cavity,
                            const CapacitorStack& stack, const OperatingPoint& op,
                            double g0_override, const PhysicalConstants& pc) {
    BiasState b;
    b.omega_sq = anti_spring_frequency_sq(mode, stack, op);
    if (!(b.omega_sq > 0.0))
        throw domain_error("bias_state", "bias beyond pull-in");
    b.omega = std::sqrt(b.omega_sq);
    b.gamma_m = bias_damping(mode, stack, op);
    b.n = photon_number(cavity, stack, op, pc);
    b.g0 = g0_override > 0.0 ? g0_override : vacuum_coupling(mode, cavity, stack, pc).g0;
    b.gamma_em = b.gamma_m + 4.0 * b.g0 * b.g0 * b.n / cavity_linewidth(cavity);
    b.v_dceq = effective_bias(op) * equivalent_capacitance_dx(stack, 0.0);
    return b;
}

}  // namespace detail

/// Cavity back-action force noise, N^2/Hz, evaluated on resonance:
/// hbar^2 G^2 n kappa |A_-(W_m)|^2.
inline double backaction_force_noise(const MechanicalMode& mode, const MicrowaveCavity& cavity,
                                     const CapacitorStack& stack, const OperatingPoint& op,
                                     double g0_override = 0.0,
                                     const PhysicalConstants& pc = codata()) {
    const double n = photon_number(cavity, stack, op, pc);
    if (n == 0.0) return 0.0;
    double pull = std::abs(frequency_pull(cavity, stack, 0.0));
    if (g0_override > 0.0)
        pull = g0_override / vacuum_coupling(mode, cavity, stack, pc).x_zpf;
    const double omega_m = anti_spring_frequency(mode, stack, op);
    const double a = std::abs(cavity_response(cavity, op, omega_m));
    const double h = pc.reduced_planck;
    return h * h * pull * pull * n * cavity_linewidth(cavity) * a * a;
}

/// Force-noise decomposition at frequency omega (defaults to resonance when
/// omega <= 0), input-referred to the mode, N^2/Hz.
inline NoiseBudget force_noise_budget(const MechanicalMode& mode, const MicrowaveCavity& cavity,
                                      const CapacitorStack& stack, const OperatingPoint& op,
                                      double omega = 0.0, BudgetOptions opts = {},
                                      double g0_override = 0.0,
                                      const PhysicalConstants& pc = codata()) {
    const auto b = detail::bias_state(mode, cavity, stack, op, g0_override, pc);
    const double w = omega > 0.0 ? omega : b.omega;

    NoiseBudget out;
    const double gamma_th = opts.cold_damping_accounting ? b.gamma_em : b.gamma_m;
    out.thermal = 2.0 * mode.m_eff * gamma_th * pc.boltzmann * op.temperature;
    out.electrical = b.v_dceq * b.v_dceq * op.rf_noise_psd;
    out.backaction = backaction_force_noise(mode, cavity, stack, op, g0_override, pc);
    if (op.detector_psd > 0.0) {
        const double gem = electromechanical_gain(mode, cavity, stack, op, w, g0_override, pc);
        const double chi = std::abs(susceptibility(mode.m_eff, b.omega_sq, b.gamma_em, w));
        // With no pump there is no transduction: the input-referred detector
        // noise is genuinely infinite rather than an error.
        out.detector_equivalent = (gem > 0.0 && chi > 0.0)
                                      ? op.detector_psd / (gem * gem * chi * chi)
                                      : std::numeric_limits<double>::infinity();
    }
    return out;
}

/// Transduced sideband spectrum sampled on omega_grid (rad/s), V^2/Hz at the
/// device output. Contains the transduced bias-line noise, the thermal and
/// back-action peak, and the flat detection floor; a coherent drive tone is
/// a delta line and is handled by the dataset generator, not here. The
/// envelope has the cold-damped width Gamma_em, while the thermal weight
/// keeps Gamma_m(V) so the integrated peak reproduces the damped variance.
inline std::vector<double> sideband_spectrum(const MechanicalMode& mode,
                                             const MicrowaveCavity& cavity,
                                             const CapacitorStack& stack,
                                             const OperatingPoint& op,
                                             const std::vector<double>& omega_grid,
                                             double g0_override = 0.0,
                                             const PhysicalConstants& pc = codata()) {
    const auto b = detail::bias_state(mode, cavity, stack, op, g0_override, pc);
    const double s_ff_peak = 2.0 * mode.m_eff * b.gamma_m * pc.boltzmann * op.temperature +
                             backaction_force_noise(mode, cavity, stack, op, g0_override, pc) +
                             b.v_dceq * b.v_dceq * op.rf_noise_psd;
    std::vector<double> out;
    out.reserve(omega_grid.size());
    for (double w : omega_grid) {
        const double gem = electromechanical_gain(mode, cavity, stack, op, w, g0_override, pc);
        const double chi = std::abs(susceptibility(mode.m_eff, b.omega_sq, b.gamma_em, w));
        out.push_back(gem * gem * chi * chi * s_ff_peak + op.detector_psd);
    }
    return out;
}

/// Integrated sideband peak (detection floor excluded). With chain_gain = 1
/// the result is the mode's displacement variance in m^2; chain_gain (V/m)
/// refers it to the spectrum analyzer. Matches the quadrature of
/// sideband_spectrum analytically:
///   A(V) = (1 / 2 m W^2(V)) [ k_B T Gamma_m/Gamma_em
///           + (V - V0)^2 (dC_eq/dx)^2 S_vv^n / (2 m Gamma_em) ].
inline double sideband_area(const MechanicalMode& mode, const CapacitorStack& stack,
                            const OperatingPoint& op, double chain_gain, double gamma_em = 0.0,
                            const PhysicalConstants& pc = codata()) {
    const double omega_sq = anti_spring_frequency_sq(mode, stack, op);
    if (!(omega_sq > 0.0)) throw domain_error("sideband_area", "bias beyond pull-in");
    const double gamma_m = bias_damping(mode, stack, op);
    const double gem = gamma_em > 0.0 ? gamma_em : gamma_m;
    if (!(gem > 0.0)) throw domain_error("sideband_area", "requires a positive linewidth");
    const double v_dceq = effective_bias(op) * equivalent_capacitance_dx(stack, 0.0);
    const double thermal = pc.boltzmann * op.temperature * gamma_m / gem;
    const double electrical = v_dceq * v_dceq * op.rf_noise_psd / (2.0 * mode.m_eff * gem);
    return chain_gain * chain_gain * (thermal + electrical) / (2.0 * mode.m_eff * omega_sq);
}

/// On-resonance signal-to-noise ratio (amplitude ratio):
/// SNR^2 = |V dC|^2 Ss / (|V dC|^2 Sn + S_th + S_ba + S_det-equivalent).
inline double snr(const MechanicalMode& mode, const MicrowaveCavity& cavity,
                  const CapacitorStack& stack, const OperatingPoint& op,
                  double g0_override = 0.0, const PhysicalConstants& pc = codata()) {
    const auto b = detail::bias_state(mode, cavity, stack, op, g0_override, pc);
    const NoiseBudget budget = force_noise_budget(mode, cavity, stack, op, b.omega,
                                                  BudgetOptions{true}, g0_override, pc);
    const double denom = budget.total();
    if (!(denom > 0.0)) throw domain_error("snr", "no noise channel is active");
    return std::sqrt(b.v_dceq * b.v_dceq * op.rf_drive_psd / denom);
}

struct Sensitivity {
    double voltage = 0.0;  // V/sqrt(Hz)
    double charge = 0.0;   // e/sqrt(Hz)
};

inline double charge_from_voltage_sensitivity(double voltage_sens, double c_eq,
                                              const PhysicalConstants& pc = codata()) {
    return c_eq * voltage_sens / pc.elementary_charge;
}

/// Thermal-noise-limited sensitivity sqrt(2 m Gamma k_B T) / |V dC|, plus
/// its charge equivalent through the bias-circuit capacitance.
inline Sensitivity min_sensitivity(const MechanicalMode& mode, const CapacitorStack& stack,
                                   const OperatingPoint& op, double gamma_override = 0.0,
                                   const PhysicalConstants& pc = codata()) {
    const double v = effective_bias(op);
    if (v == 0.0)
        throw domain_error("min_sensitivity", "zero effective bias: no electrostatic lever");
    const double gamma = gamma_override > 0.0 ? gamma_override : bias_damping(mode, stack, op);
    const double v_dceq = std::abs(v * equivalent_capacitance_dx(stack, 0.0));
    Sensitivity s;
    s.voltage = std::sqrt(2.0 * mode.m_eff * gamma * pc.boltzmann * op.temperature) / v_dceq;
    s.charge = charge_from_voltage_sensitivity(s.voltage, equivalent_capacitance(stack, 0.0), pc);
    return s;
}

// ---------------------------------------------------------------------------
// One-shot evaluation of the full operating point
// ---------------------------------------------------------------------------

struct Derived {
    double omega_c0 = 0.0;       // rad/s, resonator at x = 0
    double kappa = 0.0;          // rad/s
    double c_m0 = 0.0;           // F
    double c_eq0 = 0.0;          // F
    double eta = 0.0;            // voltage dilution
    double dceq_dx = 0.0;        // F/m
    double d2ceq_dx2 = 0.0;      // F/m^2
    double omega_m_v = 0.0;      // rad/s, bias-shifted
    double gamma_m_v = 0.0;      // rad/s, bias-broadened
    double gamma_em = 0.0;       // rad/s, cold-damped
    double photon_number = 0.0;
    double g0 = 0.0;             // rad/s, value used (override or geometric)
    double g0_geometric = 0.0;   // rad/s
    double x_zpf = 0.0;          // m
    double cooperativity = 0.0;  // referenced to Gamma_m(V)
    double sideband_resolution = 0.0;  // W_m(V) / kappa
    double gain_em = 0.0;        // V/m on resonance
    double gain_v = 0.0;         // m/V on resonance
    double gain_tot = 0.0;       // V/V on resonance (product form)
    double gain_tot_db = 0.0;
    NoiseBudget budget;          // on resonance, cold-damping accounting
    double snr = 0.0;            // amplitude ratio; 0 when no drive
    double snr_db = 0.0;
    Sensitivity sens_gamma_m;    // thermal-limited, bare linewidth
    Sensitivity sens_gamma_em;   // same with the cold-damped linewidth
};

inline Derived evaluate(const SystemParams& sys) {
    validate(sys);
    const auto& pc = sys.constants;
    Derived d;
    d.omega_c0 = cavity_frequency(sys.cavity, sys.stack, 0.0);
    d.kappa = cavity_linewidth(sys.cavity);
    d.c_m0 = membrane_capacitance(sys.stack, 0.0);
    d.c_eq0 = equivalent_capacitance(sys.stack, 0.0);
    d.eta = voltage_dilution(sys.stack, 0.0);
    d.dceq_dx = equivalent_capacitance_dx(sys.stack, 0.0);
    d.d2ceq_dx2 = equivalent_capacitance_dxx(sys.stack, 0.0);

    const auto b = detail::bias_state(sys.mode, sys.cavity, sys.stack, sys.op, sys.g0_override, pc);
    d.omega_m_v = b.omega;
    d.gamma_m_v = b.gamma_m;
    d.gamma_em = b.gamma_em;
    d.photon_number = b.n;
    d.g0 = b.g0;
    const auto vc = vacuum_coupling(sys.mode, sys.cavity, sys.stack, pc);
    d.g0_geometric = vc.g0;
    d.x_zpf = vc.x_zpf;
    d.cooperativity = b.n > 0.0 ? cooperativity(b.g0, b.n, d.kappa, b.gamma_m) : 0.0;
    d.sideband_resolution = b.omega / d.kappa;

    d.gain_em = electromechanical_gain(sys.mode, sys.cavity, sys.stack, sys.op, b.omega,
                                       sys.g0_override, pc);
    d.gain_v = electrostatic_gain(sys.mode, sys.stack, sys.op, b.omega);
    d.gain_tot = d.gain_em * d.gain_v;
    d.gain_tot_db = d.gain_tot > 0.0 ? db_from_amplitude_ratio(d.gain_tot) : 0.0;

    d.budget = force_noise_budget(sys.mode, sys.cavity, sys.stack, sys.op, b.omega,
                                  BudgetOptions{true}, sys.g0_override, pc);
    if (sys.op.rf_drive_psd > 0.0 && d.budget.total() > 0.0) {
        d.snr = snr(sys.mode, sys.cavity, sys.stack, sys.op, sys.g0_override, pc);
        d.snr_db = db_from_amplitude_ratio(d.snr);
    }
    if (effective_bias(sys.op) != 0.0) {
        d.sens_gamma_m = min_sensitivity(sys.mode, sys.stack, sys.op, 0.0, pc);
        d.sens_gamma_em = min_sensitivity(sys.mode, sys.stack, sys.op, b.gamma_em, pc);
    }
    return d;
}

}  // namespace emx

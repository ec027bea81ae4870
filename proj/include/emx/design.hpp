#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "emx/errors.hpp"
#include "emx/model.hpp"
#include "emx/system.hpp"
#include "emx/units.hpp"

namespace emx {

enum class Objective { total_gain_db, min_sensitivity, charge_sensitivity, cooperativity };

inline const char* to_string(Objective o) {
    switch (o) {
        case Objective::total_gain_db: return "total_gain_db";
        case Objective::min_sensitivity: return "min_sensitivity";
        case Objective::charge_sensitivity: return "charge_sensitivity";
        case Objective::cooperativity: return "cooperativity";
    }
    return "unknown";
}

inline Objective objective_from_string(const std::string& s) {
    if (s == "total_gain_db") return Objective::total_gain_db;
    if (s == "min_sensitivity") return Objective::min_sensitivity;
    if (s == "charge_sensitivity") return Objective::charge_sensitivity;
    if (s == "cooperativity") return Objective::cooperativity;
    throw config_error("sweep.objectives", "unknown objective '" + s + "'");
}

inline bool objective_is_minimized(Objective o) {
    return o == Objective::min_sensitivity || o == Objective::charge_sensitivity;
}

struct SweepAxis {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    int count = 1;
    bool log_scale = false;
};

struct DesignConstraints {
    double max_bias = 50.0;              // V
    double min_gap = 0.0;                // m
    double max_cooperativity = 0.0;      // 0 disables the bound
    double min_sideband_resolution = 0.0;  // W_m / kappa floor, 0 disables
};

struct SweepSpec {
    std::vector<SweepAxis> axes;
    SystemParams base;
    std::vector<Objective> objectives;
    std::optional<DesignConstraints> constraints;
    bool lock_detuning_to_resonance = true;
    std::size_t grid_cap = 10'000'000;
};

namespace detail {

using AxisSetter = std::function<void(SystemParams&, double)>;

inline const std::map<std::string, AxisSetter>& axis_registry() {
    static const std::map<std::string, AxisSetter> reg = {
        {"gap_m", [](SystemParams& s, double v) { s.stack.gap = v; }},
        {"membrane_area_m2", [](SystemParams& s, double v) { s.stack.membrane_cap_area = v; }},
        {"bias_cap_f", [](SystemParams& s, double v) { s.stack.bias_cap = v; }},
        {"stray_cap_f", [](SystemParams& s, double v) { s.stack.stray_cap = v; }},
        {"bias_resistance_ohm", [](SystemParams& s, double v) { s.stack.bias_resistance = v; }},
        {"bias_voltage_v", [](SystemParams& s, double v) { s.op.bias_voltage = v; }},
        {"temperature_k", [](SystemParams& s, double v) { s.op.temperature = v; }},
        {"pump_power_w", [](SystemParams& s, double v) { s.op.pump_power = v; }},
        {"quality_factor",
         [](SystemParams& s, double v) { s.mode.gamma_m0 = s.mode.omega_m0 / v; }},
        {"mode_frequency_hz", [](SystemParams& s, double v) { s.mode.omega_m0 = hz_to_rad(v); }},
        {"linewidth_hz", [](SystemParams& s, double v) { s.mode.gamma_m0 = hz_to_rad(v); }},
        {"effective_mass_kg", [](SystemParams& s, double v) { s.mode.m_eff = v; }},
        {"kappa_c_hz", [](SystemParams& s, double v) { s.cavity.kappa_c = hz_to_rad(v); }},
        {"kappa_i_hz", [](SystemParams& s, double v) { s.cavity.kappa_i = hz_to_rad(v); }},
        {"inductance_h", [](SystemParams& s, double v) { s.cavity.inductance = v; }},
        {"pump_detuning_hz", [](SystemParams& s, double v) { s.op.pump_detuning = hz_to_rad(v); }},
    };
    return reg;
}

inline double axis_value(const SweepAxis& a, int i) {
    if (a.count <= 1) return a.min;
    const double t = static_cast<double>(i) / (a.count - 1);
    if (a.log_scale) return a.min * std::pow(a.max / a.min, t);
    return a.min + t * (a.max - a.min);
}

struct PointEval {
    std::vector<double> objectives;
    bool feasible = true;
};

inline PointEval evaluate_point(SystemParams sys, const std::vector<Objective>& objectives,
                                const std::optional<DesignConstraints>& constraints,
                                bool lock_detuning) {
    const auto b0 = [&] {
        if (lock_detuning) {
            // Two-pass: shift the pump to the bias-softened resonance.
            auto probe = bias_state(sys.mode, sys.cavity, sys.stack, sys.op, sys.g0_override,
                                    sys.constants);
            sys.op.pump_detuning = -probe.omega;
        }
        return bias_state(sys.mode, sys.cavity, sys.stack, sys.op, sys.g0_override,
                          sys.constants);
    }();

    const double kappa = cavity_linewidth(sys.cavity);
    const double coop = b0.n > 0.0 ? cooperativity(b0.g0, b0.n, kappa, b0.gamma_m) : 0.0;

    PointEval out;
    if (constraints) {
        if (std::abs(effective_bias(sys.op)) > constraints->max_bias + 1e-12) out.feasible = false;
        if (sys.stack.gap < constraints->min_gap) out.feasible = false;
        if (constraints->max_cooperativity > 0.0 && coop > constraints->max_cooperativity)
            out.feasible = false;
        if (constraints->min_sideband_resolution > 0.0 &&
            b0.omega / kappa < constraints->min_sideband_resolution)
            out.feasible = false;
    }

    for (Objective o : objectives) {
        switch (o) {
            case Objective::total_gain_db: {
                const double g = total_gain_resonant(
                    coop, sys.cavity.kappa_c, kappa, sys.cavity.line_impedance,
                    cavity_frequency(sys.cavity, sys.stack, 0.0), b0.omega, sys.mode.m_eff,
                    b0.gamma_m, b0.v_dceq);
                out.objectives.push_back(db_from_amplitude_ratio(std::max(g, 1e-300)));
                break;
            }
            case Objective::min_sensitivity:
                out.objectives.push_back(
                    min_sensitivity(sys.mode, sys.stack, sys.op, 0.0, sys.constants).voltage);
                break;
            case Objective::charge_sensitivity:
                out.objectives.push_back(
                    min_sensitivity(sys.mode, sys.stack, sys.op, 0.0, sys.constants).charge);
                break;
            case Objective::cooperativity:
                out.objectives.push_back(coop);
                break;
        }
    }
    return out;
}

inline unsigned worker_count(std::size_t jobs) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("EMX_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

}  // namespace detail

struct SweepTable {
    std::vector<std::string> axis_names;
    std::vector<std::string> objective_names;
    std::vector<std::vector<double>> rows;  // axis values then objective values
    std::size_t dropped_infeasible = 0;
};

/// Evaluate the objectives over the full grid, rows in lexicographic axis
/// order (first axis slowest). Grid evaluation is parallel; row order is
/// deterministic regardless of scheduling. When constraints are given,
/// infeasible grid points are dropped and counted.
inline SweepTable sweep(const SweepSpec& spec) {
    if (spec.axes.empty()) throw config_error("sweep.axes", "at least one axis required");
    if (spec.objectives.empty())
        throw config_error("sweep.objectives", "at least one objective required");
    std::size_t total = 1;
    for (const auto& a : spec.axes) {
        if (a.count < 1) throw config_error("sweep.axes", "axis count must be >= 1");
        if (a.count > 1 && !(a.min < a.max))
            throw config_error("sweep.axes", "axis '" + a.name + "' needs min < max");
        if (a.log_scale && !(a.min > 0.0))
            throw config_error("sweep.axes", "log axis '" + a.name + "' needs min > 0");
        if (detail::axis_registry().find(a.name) == detail::axis_registry().end())
            throw config_error("sweep.axes", "unknown parameter '" + a.name + "'");
        total *= static_cast<std::size_t>(a.count);
    }
    if (total > spec.grid_cap)
        throw config_error("sweep.axes", "grid size exceeds the configured cap");

    SweepTable table;
    for (const auto& a : spec.axes) table.axis_names.push_back(a.name);
    for (Objective o : spec.objectives) table.objective_names.push_back(to_string(o));

    std::vector<std::vector<double>> rows(total);
    std::vector<char> feasible(total, 1);
    auto eval_index = [&](std::size_t flat) {
        SystemParams sys = spec.base;
        std::vector<double> coords(spec.axes.size());
        std::size_t rem = flat;
        for (std::size_t d = spec.axes.size(); d-- > 0;) {
            const auto& axis = spec.axes[d];
            const int i = static_cast<int>(rem % axis.count);
            rem /= axis.count;
            coords[d] = detail::axis_value(axis, i);
            detail::axis_registry().at(axis.name)(sys, coords[d]);
        }
        const auto e = detail::evaluate_point(sys, spec.objectives, spec.constraints,
                                              spec.lock_detuning_to_resonance);
        feasible[flat] = e.feasible ? 1 : 0;
        rows[flat] = std::move(coords);
        rows[flat].insert(rows[flat].end(), e.objectives.begin(), e.objectives.end());
    };

    const unsigned workers = detail::worker_count(total);
    if (workers <= 1) {
        for (std::size_t i = 0; i < total; ++i) eval_index(i);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < total; i += workers) eval_index(i);
            });
        for (auto& t : pool) t.join();
    }

    table.rows.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        if (spec.constraints && !feasible[i]) {
            ++table.dropped_infeasible;
            continue;
        }
        table.rows.push_back(std::move(rows[i]));
    }
    return table;
}

struct OptimizeResult {
    std::vector<std::string> axis_names;
    std::vector<double> point;
    double value = 0.0;
    bool feasible = false;
    std::size_t evaluations = 0;
};

/// Coordinate descent with golden-section line searches on the bounded axes.
/// Assumes the objective is monotone or unimodal along each axis within the
/// bounds; use multiple starts otherwise. Constraint violations act as an
/// infinite penalty.
inline OptimizeResult optimize(Objective objective, const DesignConstraints& constraints,
                               const std::vector<SweepAxis>& axes, const SystemParams& base,
                               bool lock_detuning = true, int n_starts = 1) {
    if (axes.empty()) throw config_error("optimize", "at least one free axis required");
    for (const auto& a : axes) {
        if (detail::axis_registry().find(a.name) == detail::axis_registry().end())
            throw config_error("optimize", "unknown parameter '" + a.name + "'");
        if (!(a.min < a.max)) throw config_error("optimize", "axis needs min < max");
    }

    OptimizeResult best;
    for (const auto& a : axes) best.axis_names.push_back(a.name);
    const double sign = objective_is_minimized(objective) ? 1.0 : -1.0;
    std::size_t evals = 0;

    auto cost = [&](const std::vector<double>& point) {
        SystemParams sys = base;
        for (std::size_t i = 0; i < axes.size(); ++i)
            detail::axis_registry().at(axes[i].name)(sys, point[i]);
        ++evals;
        const auto e = detail::evaluate_point(sys, {objective}, constraints, lock_detuning);
        if (!e.feasible) return std::numeric_limits<double>::infinity();
        return sign * e.objectives[0];
    };

    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    double best_cost = std::numeric_limits<double>::infinity();

    for (int start = 0; start < std::max(n_starts, 1); ++start) {
        std::vector<double> point(axes.size());
        const double t = n_starts > 1 ? static_cast<double>(start) / (n_starts - 1) : 0.5;
        for (std::size_t i = 0; i < axes.size(); ++i)
            point[i] = axes[i].log_scale
                           ? axes[i].min * std::pow(axes[i].max / axes[i].min, t)
                           : axes[i].min + t * (axes[i].max - axes[i].min);

        double current = cost(point);
        for (int pass = 0; pass < 100; ++pass) {
            const double before = current;
            for (std::size_t i = 0; i < axes.size(); ++i) {
                double lo = axes[i].min, hi = axes[i].max;
                auto line = [&](double v) {
                    std::vector<double> probe = point;
                    probe[i] = v;
                    return cost(probe);
                };
                double x1 = hi - golden * (hi - lo);
                double x2 = lo + golden * (hi - lo);
                double f1 = line(x1), f2 = line(x2);
                for (int it = 0; it < 80 && (hi - lo) > 1e-12 * (axes[i].max - axes[i].min);
                     ++it) {
                    if (f1 < f2) {
                        hi = x2; x2 = x1; f2 = f1;
                        x1 = hi - golden * (hi - lo);
                        f1 = line(x1);
                    } else {
                        lo = x1; x1 = x2; f1 = f2;
                        x2 = lo + golden * (hi - lo);
                        f2 = line(x2);
                    }
                }
                const double candidate = f1 < f2 ? x1 : x2;
                const double cand_cost = std::min(f1, f2);
                // Endpoints win for monotone objectives.
                const double flo = line(axes[i].min), fhi = line(axes[i].max);
                double v = candidate, c = cand_cost;
                if (flo < c) { v = axes[i].min; c = flo; }
                if (fhi < c) { v = axes[i].max; c = fhi; }
                if (c < current) { point[i] = v; current = c; }
            }
            if (!(before - current > 1e-12 * std::max(std::abs(before), 1.0))) break;
        }
        if (current < best_cost) {
            best_cost = current;
            best.point = point;
        }
    }

    best.evaluations = evals;
    best.feasible = std::isfinite(best_cost);
    best.value = best.feasible ? sign * best_cost : std::numeric_limits<double>::quiet_NaN();
    return best;
}

// ---------------------------------------------------------------------------
// Published design projection
// ---------------------------------------------------------------------------

/// Input set of the published state-of-the-art projection: a 1 ng, 4 MHz,
/// Q = 4e8 membrane at 10 mK over a 500 nm gap (15 nF/m lever arm, 10 fF
/// capacitor) read out by a 6 GHz resonator at cooperativity 0.1.
struct ProjectionPoint {
    double cooperativity = 0.1;
    double kappa_c = hz_to_rad(0.5e6);
    double kappa_i = hz_to_rad(1.0e6);
    double line_impedance = 50.0;
    double omega_c = hz_to_rad(6.0e9);
    double omega_m = hz_to_rad(4.0e6);
    double m_eff = 1.0e-12;
    double gamma_m = hz_to_rad(10.0e-3);
    double bias = 50.0;
    double dceq_dx = 15.0e-9;
    double temperature = 10.0e-3;
    double charge_capacitance = 10.0e-15;
};

struct ProjectionResult {
    double gain = 0.0;  // V/V
    double gain_db = 0.0;
    double sensitivity_v = 0.0;  // V/sqrt(Hz)
    double sensitivity_e = 0.0;  // e/sqrt(Hz)
};

inline ProjectionResult reproduce_projection(const ProjectionPoint& p = {},
                                             const PhysicalConstants& pc = codata()) {
    ProjectionResult r;
    const double kappa = p.kappa_c + p.kappa_i;
    const double v_dceq = p.bias * p.dceq_dx;
    r.gain = total_gain_resonant(p.cooperativity, p.kappa_c, kappa, p.line_impedance, p.omega_c,
                                 p.omega_m, p.m_eff, p.gamma_m, v_dceq);
    r.gain_db = db_from_amplitude_ratio(r.gain);
    r.sensitivity_v =
        std::sqrt(2.0 * p.m_eff * p.gamma_m * pc.boltzmann * p.temperature) / v_dceq;
    r.sensitivity_e = charge_from_voltage_sensitivity(r.sensitivity_v, p.charge_capacitance, pc);
    return r;
}

}  // namespace emx

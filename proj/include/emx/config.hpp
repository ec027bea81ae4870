#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "emx/design.hpp"
#include "emx/errors.hpp"
#include "emx/synth.hpp"
#include "emx/system.hpp"
#include "emx/units.hpp"

namespace emx {

using json = nlohmann::json;

// Versioned JSON configuration. All physical keys carry unit suffixes and
// the file speaks Hz / dBm / volts / kelvin; conversion to SI angular
// frequencies happens here and only here. Unknown keys are rejected.

namespace detail {

class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw config_error(path_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    double number(const std::string& key) {
        require(key);
        return as_number(key);
    }

    double number_or(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        return as_number(key);
    }

    int integer(const std::string& key) {
        require(key);
        mark(key);
        if (!j_.at(key).is_number_integer())
            throw config_error(path_ + "." + key, "expected an integer");
        return j_.at(key).get<int>();
    }

    int integer_or(const std::string& key, int fallback) {
        if (!has(key)) return fallback;
        return integer(key);
    }

    std::string text(const std::string& key) {
        require(key);
        mark(key);
        if (!j_.at(key).is_string())
            throw config_error(path_ + "." + key, "expected a string");
        return j_.at(key).get<std::string>();
    }

    std::string text_or(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        return text(key);
    }

    bool boolean_or(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        mark(key);
        if (!j_.at(key).is_boolean())
            throw config_error(path_ + "." + key, "expected a boolean");
        return j_.at(key).get<bool>();
    }

    std::vector<double> number_list(const std::string& key) {
        require(key);
        mark(key);
        if (!j_.at(key).is_array())
            throw config_error(path_ + "." + key, "expected an array of numbers");
        std::vector<double> out;
        for (const auto& v : j_.at(key)) {
            if (!v.is_number())
                throw config_error(path_ + "." + key, "expected an array of numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }

    json child(const std::string& key) {
        require(key);
        mark(key);
        return j_.at(key);
    }

    std::optional<json> child_opt(const std::string& key) {
        if (!has(key)) return std::nullopt;
        mark(key);
        return j_.at(key);
    }

    const std::string& path() const { return path_; }

    /// Unknown-key audit; call once all expected fields are consumed.
    void finish() const {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key()))
                throw config_error(path_ + "." + item.key(), "unknown key");
    }

private:
    void require(const std::string& key) const {
        if (!has(key)) throw config_error(path_ + "." + key, "missing required key");
    }
    void mark(const std::string& key) { seen_.insert(key); }
    double as_number(const std::string& key) {
        mark(key);
        if (!j_.at(key).is_number())
            throw config_error(path_ + "." + key, "expected a number");
        return j_.at(key).get<double>();
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace detail

struct SynthConfig {
    DatasetKind kind = DatasetKind::spectrum;
    std::uint64_t seed = 1;
    double rbw_hz = 1.0;
    int n_averages = 100;
    double f_start_hz = 0.0, f_stop_hz = 0.0;
    int n_points = 0;
    double chain_gain = 1.0;
    double noise_rel_sigma = 0.03;
    double sample_rate_hz = 0.0, duration_s = 0.0;
    double ringdown_amplitude = 1.0, ringdown_noise_sigma = 0.0;
    std::vector<double> sweep_values;
};

struct FitConfig {
    std::string recipe;
    double chain_gain = 1.0;
    double charge_capacitance = 0.0;  // 0: use the model C_eq
};

struct ConfigDocument {
    int version = 1;
    SystemParams system;
    std::optional<MembraneGeometry> geometry;
    std::optional<SynthConfig> synth;
    std::optional<FitConfig> fit;
    std::optional<SweepSpec> sweep;  // base filled with `system`
    double charge_capacitance = 0.0;
};

namespace detail {

inline PhysicalConstants parse_constants(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    PhysicalConstants pc;
    pc.vacuum_permittivity = r.number_or("vacuum_permittivity_f_per_m", pc.vacuum_permittivity);
    pc.reduced_planck = r.number_or("reduced_planck_j_s", pc.reduced_planck);
    pc.boltzmann = r.number_or("boltzmann_j_per_k", pc.boltzmann);
    pc.elementary_charge = r.number_or("elementary_charge_c", pc.elementary_charge);
    r.finish();
    return pc;
}

inline MembraneGeometry parse_geometry(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    MembraneGeometry g;
    g.length_y = r.number("length_y_m");
    g.length_z = r.number("length_z_m");
    g.thickness = r.number("thickness_m");
    g.stress = r.number("stress_pa");
    g.density = r.number("density_kg_per_m3");
    g.metal_thickness = r.number_or("metal_thickness_m", 0.0);
    g.metal_density = r.number_or("metal_density_kg_per_m3", 0.0);
    g.electrode.center_y = r.number_or("electrode_center_y_m", 0.5 * g.length_y);
    g.electrode.center_z = r.number_or("electrode_center_z_m", 0.5 * g.length_z);
    g.electrode.extent_y = r.number_or("electrode_extent_y_m", g.length_y);
    g.electrode.extent_z = r.number_or("electrode_extent_z_m", g.length_z);
    r.finish();
    try {
        validate(g);
    } catch (const domain_error& e) {
        throw config_error(path, e.what());
    }
    return g;
}

inline MechanicalMode parse_mode(const json& j, const std::string& path, double& g0_override) {
    ObjectReader r(j, path);
    MechanicalMode m;
    m.index_p = r.integer_or("index_p", 1);
    m.index_q = r.integer_or("index_q", 1);
    m.omega_m0 = hz_to_rad(r.number("frequency_hz"));
    m.gamma_m0 = hz_to_rad(r.number("linewidth_hz"));
    m.m_eff = r.number("effective_mass_kg");
    g0_override = hz_to_rad(r.number_or("g0_hz", 0.0));
    r.finish();
    return m;
}

inline CapacitorStack parse_capacitors(const json& j, const std::string& path,
                                       const PhysicalConstants& pc) {
    ObjectReader r(j, path);
    CapacitorStack s;
    s.gap = r.number("gap_m");
    s.membrane_cap_area = r.number("membrane_area_m2");
    s.stray_cap = r.number("stray_cap_f");
    s.bias_cap = r.number("bias_cap_f");
    s.bias_resistance = r.number_or("bias_resistance_ohm", 0.0);
    s.vacuum_permittivity = pc.vacuum_permittivity;
    r.finish();
    return s;
}

inline MicrowaveCavity parse_cavity(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    MicrowaveCavity c;
    c.inductance = r.number("inductance_h");
    c.kappa_c = hz_to_rad(r.number("kappa_c_hz"));
    c.kappa_i = hz_to_rad(r.number("kappa_i_hz"));
    c.line_impedance = r.number_or("line_impedance_ohm", 50.0);
    r.finish();
    return c;
}

inline OperatingPoint parse_operating_point(const json& j, const std::string& path,
                                            double line_impedance) {
    ObjectReader r(j, path);
    OperatingPoint op;
    op.bias_voltage = r.number("bias_voltage_v");
    op.charge_offset_voltage = r.number_or("charge_offset_v", 0.0);
    if (r.has("pump_power_dbm")) {
        const double dbm = r.number("pump_power_dbm");
        const double attenuation = r.number_or("pump_line_attenuation_db", 0.0);
        op.pump_power = dbm_to_watt(dbm - attenuation);
    } else {
        op.pump_power = r.number_or("pump_power_w", 0.0);
    }
    op.pump_detuning = hz_to_rad(r.number("pump_detuning_hz"));
    op.temperature = r.number("temperature_k");
    if (r.has("rf_drive_dbm"))
        op.rf_drive_psd = dbm_to_v2_per_hz(r.number("rf_drive_dbm"), line_impedance);
    const double vn = r.number_or("rf_noise_v_per_sqrt_hz", 0.0);
    op.rf_noise_psd = vn * vn;
    const double vd = r.number_or("detector_noise_v_per_sqrt_hz", 0.0);
    op.detector_psd = vd * vd;
    op.rf_frequency = hz_to_rad(r.number_or("rf_frequency_hz", 0.0));
    r.finish();
    return op;
}

inline SynthConfig parse_synth(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    SynthConfig s;
    s.kind = dataset_kind_from_string(r.text("kind"));
    const double seed = r.number_or("seed", 1);
    s.seed = static_cast<std::uint64_t>(seed);
    s.rbw_hz = r.number_or("rbw_hz", 0.0);
    s.n_averages = r.integer_or("n_averages", 100);
    s.f_start_hz = r.number_or("f_start_hz", 0.0);
    s.f_stop_hz = r.number_or("f_stop_hz", 0.0);
    s.n_points = r.integer_or("n_points", 0);
    s.chain_gain = r.number_or("chain_gain_v_per_m", 1.0);
    s.noise_rel_sigma = r.number_or("noise_rel_sigma", 0.03);
    s.sample_rate_hz = r.number_or("sample_rate_hz", 0.0);
    s.duration_s = r.number_or("duration_s", 0.0);
    s.ringdown_amplitude = r.number_or("ringdown_amplitude", 1.0);
    s.ringdown_noise_sigma = r.number_or("ringdown_noise_sigma", 0.0);
    if (r.has("sweep_values")) s.sweep_values = r.number_list("sweep_values");
    r.finish();
    return s;
}

inline FitConfig parse_fit(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    FitConfig f;
    f.recipe = r.text("recipe");
    f.chain_gain = r.number_or("chain_gain_v_per_m", 1.0);
    f.charge_capacitance = r.number_or("charge_capacitance_f", 0.0);
    r.finish();
    return f;
}

inline SweepSpec parse_sweep(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    SweepSpec spec;
    const json axes = r.child("axes");
    if (!axes.is_array() || axes.empty())
        throw config_error(path + ".axes", "expected a non-empty array");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        ObjectReader ar(axes[i], path + ".axes[" + std::to_string(i) + "]");
        SweepAxis axis;
        axis.name = ar.text("name");
        axis.min = ar.number("min");
        axis.max = ar.number_or("max", axis.min);
        axis.count = ar.integer_or("count", 1);
        const std::string scale = ar.text_or("scale", "linear");
        if (scale != "linear" && scale != "log")
            throw config_error(ar.path() + ".scale", "expected 'linear' or 'log'");
        axis.log_scale = scale == "log";
        ar.finish();
        spec.axes.push_back(axis);
    }
    const json objectives = r.child("objectives");
    if (!objectives.is_array() || objectives.empty())
        throw config_error(path + ".objectives", "expected a non-empty array");
    for (const auto& o : objectives) {
        if (!o.is_string()) throw config_error(path + ".objectives", "expected strings");
        spec.objectives.push_back(objective_from_string(o.get<std::string>()));
    }
    if (auto c = r.child_opt("constraints")) {
        ObjectReader cr(*c, path + ".constraints");
        DesignConstraints cons;
        cons.max_bias = cr.number_or("max_bias_v", cons.max_bias);
        cons.min_gap = cr.number_or("min_gap_m", cons.min_gap);
        cons.max_cooperativity = cr.number_or("max_cooperativity", 0.0);
        cons.min_sideband_resolution = cr.number_or("min_sideband_resolution", 0.0);
        cr.finish();
        spec.constraints = cons;
    }
    spec.lock_detuning_to_resonance = r.boolean_or("lock_detuning_to_resonance", true);
    spec.grid_cap = static_cast<std::size_t>(r.number_or("grid_cap", 1e7));
    r.finish();
    return spec;
}

}  // namespace detail

inline ConfigDocument parse_config(const json& j) {
    detail::ObjectReader r(j, "config");
    ConfigDocument doc;
    doc.version = r.integer_or("version", 1);
    if (doc.version != 1) throw config_error("config.version", "unsupported version");

    doc.system.constants = r.has("constants")
                               ? detail::parse_constants(r.child("constants"), "config.constants")
                               : codata();
    if (r.has("geometry"))
        doc.geometry = detail::parse_geometry(r.child("geometry"), "config.geometry");
    doc.system.geometry = doc.geometry;
    doc.system.mode = detail::parse_mode(r.child("mode"), "config.mode", doc.system.g0_override);
    doc.system.stack =
        detail::parse_capacitors(r.child("capacitors"), "config.capacitors",
                                 doc.system.constants);
    doc.system.cavity = detail::parse_cavity(r.child("cavity"), "config.cavity");
    doc.system.op = detail::parse_operating_point(r.child("operating_point"),
                                                  "config.operating_point",
                                                  doc.system.cavity.line_impedance);
    if (r.has("synth")) doc.synth = detail::parse_synth(r.child("synth"), "config.synth");
    if (r.has("fit")) doc.fit = detail::parse_fit(r.child("fit"), "config.fit");
    if (r.has("sweep")) {
        doc.sweep = detail::parse_sweep(r.child("sweep"), "config.sweep");
        doc.sweep->base = doc.system;
    }
    if (r.has("report")) {
        detail::ObjectReader rr(r.child("report"), "config.report");
        doc.charge_capacitance = rr.number_or("charge_capacitance_f", 0.0);
        rr.finish();
    }
    r.finish();

    try {
        validate(doc.system);
    } catch (const domain_error& e) {
        throw config_error("config", e.what());
    }
    return doc;
}

inline ConfigDocument load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot read config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw config_error(path, std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

// Serialization of a full system back into the config schema; used for
// dataset sidecars so that the embedded truth re-parses through the same
// strict reader.
inline json to_json(const SystemParams& sys) {
    json j;
    j["version"] = 1;
    j["mode"] = {{"index_p", sys.mode.index_p},
                 {"index_q", sys.mode.index_q},
                 {"frequency_hz", rad_to_hz(sys.mode.omega_m0)},
                 {"linewidth_hz", rad_to_hz(sys.mode.gamma_m0)},
                 {"effective_mass_kg", sys.mode.m_eff}};
    if (sys.g0_override > 0.0) j["mode"]["g0_hz"] = rad_to_hz(sys.g0_override);
    j["capacitors"] = {{"gap_m", sys.stack.gap},
                       {"membrane_area_m2", sys.stack.membrane_cap_area},
                       {"stray_cap_f", sys.stack.stray_cap},
                       {"bias_cap_f", sys.stack.bias_cap},
                       {"bias_resistance_ohm", sys.stack.bias_resistance}};
    j["cavity"] = {{"inductance_h", sys.cavity.inductance},
                   {"kappa_c_hz", rad_to_hz(sys.cavity.kappa_c)},
                   {"kappa_i_hz", rad_to_hz(sys.cavity.kappa_i)},
                   {"line_impedance_ohm", sys.cavity.line_impedance}};
    json op = {{"bias_voltage_v", sys.op.bias_voltage},
               {"charge_offset_v", sys.op.charge_offset_voltage},
               {"pump_power_w", sys.op.pump_power},
               {"pump_detuning_hz", rad_to_hz(sys.op.pump_detuning)},
               {"temperature_k", sys.op.temperature}};
    if (sys.op.rf_drive_psd > 0.0)
        op["rf_drive_dbm"] = v2_per_hz_to_dbm(sys.op.rf_drive_psd, sys.cavity.line_impedance);
    if (sys.op.rf_noise_psd > 0.0)
        op["rf_noise_v_per_sqrt_hz"] = std::sqrt(sys.op.rf_noise_psd);
    if (sys.op.detector_psd > 0.0)
        op["detector_noise_v_per_sqrt_hz"] = std::sqrt(sys.op.detector_psd);
    if (sys.op.rf_frequency > 0.0) op["rf_frequency_hz"] = rad_to_hz(sys.op.rf_frequency);
    j["operating_point"] = op;
    if (sys.geometry) {
        const auto& g = *sys.geometry;
        j["geometry"] = {{"length_y_m", g.length_y},
                         {"length_z_m", g.length_z},
                         {"thickness_m", g.thickness},
                         {"stress_pa", g.stress},
                         {"density_kg_per_m3", g.density},
                         {"metal_thickness_m", g.metal_thickness},
                         {"metal_density_kg_per_m3", g.metal_density},
                         {"electrode_center_y_m", g.electrode.center_y},
                         {"electrode_center_z_m", g.electrode.center_z},
                         {"electrode_extent_y_m", g.electrode.extent_y},
                         {"electrode_extent_z_m", g.electrode.extent_z}};
    }
    return j;
}

inline json sidecar_json(const SyntheticDataset& ds) {
    json j;
    j["kind"] = to_string(ds.kind);
    j["seed"] = ds.seed;
    j["true_params"] = to_json(ds.truth);
    json s;
    s["chain_gain_v_per_m"] = ds.settings.chain_gain;
    s["noise_rel_sigma"] = ds.settings.noise_rel_sigma;
    s["rbw_hz"] = ds.settings.rbw_hz;
    s["n_averages"] = ds.settings.n_averages;
    if (ds.kind == DatasetKind::ringdown) {
        s["sample_rate_hz"] = ds.settings.sample_rate_hz;
        s["duration_s"] = ds.settings.duration_s;
        s["ringdown_amplitude"] = ds.settings.ringdown_amplitude;
        s["ringdown_noise_sigma"] = ds.settings.ringdown_noise_sigma;
    }
    j["settings"] = s;
    if (!ds.warnings.empty()) j["warnings"] = ds.warnings;
    return j;
}

}  // namespace emx

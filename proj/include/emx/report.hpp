#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "emx/config.hpp"
#include "emx/model.hpp"
#include "emx/recipes.hpp"

namespace emx {

/// FNV-1a of the canonical (sorted-key) JSON text; ties every report to the
/// exact inputs it was computed from.
inline std::string inputs_hash(const json& j) {
    const std::string text = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

struct Report {
    std::string command;
    json inputs;
    json outputs;
    std::vector<std::string> warnings;

    json to_json() const {
        json j;
        j["command"] = command;
        j["inputs_hash"] = inputs_hash(inputs);
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        if (!warnings.empty()) j["warnings"] = warnings;
        return j;
    }

    std::string render_text() const {
        std::ostringstream os;
        os << "# emx " << command << " (inputs " << inputs_hash(inputs) << ")\n";
        render_node(os, outputs, "");
        for (const auto& w : warnings) os << "warning: " << w << "\n";
        return os.str();
    }

private:
    static void render_node(std::ostringstream& os, const json& node, const std::string& prefix) {
        if (node.is_object()) {
            for (const auto& item : node.items())
                render_node(os, item.value(),
                            prefix.empty() ? item.key() : prefix + "." + item.key());
        } else if (node.is_array() && node.size() > 8) {
            os << prefix << ": [" << node.size() << " values]\n";
        } else {
            os << prefix << ": " << node.dump() << "\n";
        }
    }
};

inline void write_report(const Report& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << rep.to_json().dump(2) << "\n";
    if (!out.good()) throw io_error("write failed for '" + path + "'");
}

namespace detail {

inline json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace detail

/// Full single-point evaluation: gains, linewidths, noise budget, a short
/// spectrum around the resonance, and the sensitivity pair.
inline Report predict_report(const SystemParams& sys, double charge_capacitance = 0.0) {
    Report rep;
    rep.command = "predict";
    rep.inputs = to_json(sys);

    const Derived d = evaluate(sys);
    json o;
    o["cavity"] = {{"frequency_hz", rad_to_hz(d.omega_c0)},
                   {"linewidth_hz", rad_to_hz(d.kappa)},
                   {"photon_number", d.photon_number},
                   {"sideband_resolution", d.sideband_resolution}};
    o["capacitors"] = {{"c_m_f", d.c_m0},
                       {"c_eq_f", d.c_eq0},
                       {"voltage_dilution", d.eta},
                       {"dceq_dx_f_per_m", d.dceq_dx},
                       {"d2ceq_dx2_f_per_m2", d.d2ceq_dx2}};
    o["mechanics"] = {{"frequency_hz", rad_to_hz(d.omega_m_v)},
                      {"linewidth_hz", rad_to_hz(d.gamma_m_v)},
                      {"cold_damped_linewidth_hz", rad_to_hz(d.gamma_em)},
                      {"cooperativity", d.cooperativity},
                      {"g0_hz", rad_to_hz(d.g0)},
                      {"g0_geometric_hz", rad_to_hz(d.g0_geometric)},
                      {"x_zpf_m", d.x_zpf}};
    o["gains"] = {{"electromechanical_v_per_m", d.gain_em},
                  {"electrostatic_m_per_v", d.gain_v},
                  {"total_v_per_v", d.gain_tot},
                  {"total_db", d.gain_tot_db}};
    o["force_noise_n2_per_hz"] = {{"thermal", d.budget.thermal},
                                  {"electrical", d.budget.electrical},
                                  {"backaction", d.budget.backaction},
                                  {"detector_equivalent",
                                   detail::number_or_null(d.budget.detector_equivalent)},
                                  {"total", detail::number_or_null(d.budget.total())}};
    if (sys.op.rf_drive_psd > 0.0) o["snr"] = {{"amplitude", d.snr}, {"db", d.snr_db}};

    if (effective_bias(sys.op) != 0.0) {
        const double c_for_charge =
            charge_capacitance > 0.0 ? charge_capacitance : d.c_eq0;
        json sens;
        sens["voltage_v_per_sqrt_hz"] = d.sens_gamma_m.voltage;
        sens["charge_e_per_sqrt_hz"] =
            charge_from_voltage_sensitivity(d.sens_gamma_m.voltage, c_for_charge, sys.constants);
        sens["voltage_cold_damped_v_per_sqrt_hz"] = d.sens_gamma_em.voltage;
        sens["charge_capacitance_f"] = c_for_charge;
        o["min_sensitivity"] = sens;
    }

    // Short spectrum around the (shifted) resonance.
    {
        const int n = 101;
        const double span = 10.0 * d.gamma_em;
        std::vector<double> w(n);
        for (int i = 0; i < n; ++i)
            w[i] = d.omega_m_v - span + 2.0 * span * static_cast<double>(i) / (n - 1);
        const auto s = sideband_spectrum(sys.mode, sys.cavity, sys.stack, sys.op, w,
                                         sys.g0_override, sys.constants);
        json freq = json::array(), psd = json::array();
        for (int i = 0; i < n; ++i) {
            freq.push_back(rad_to_hz(w[i]));
            psd.push_back(s[i]);
        }
        o["spectrum"] = {{"frequency_hz", freq}, {"psd_v2_per_hz", psd}};
    }
    rep.outputs = o;
    return rep;
}

}  // namespace emx

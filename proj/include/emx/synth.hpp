#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "emx/errors.hpp"
#include "emx/model.hpp"
#include "emx/rng.hpp"
#include "emx/system.hpp"

namespace emx {

enum class DatasetKind { spectrum, ringdown, area_vs_t, area_vs_v, snr_vs_v };

inline const char* to_string(DatasetKind k) {
    switch (k) {
        case DatasetKind::spectrum: return "spectrum";
        case DatasetKind::ringdown: return "ringdown";
        case DatasetKind::area_vs_t: return "area_vs_t";
        case DatasetKind::area_vs_v: return "area_vs_v";
        case DatasetKind::snr_vs_v: return "snr_vs_v";
    }
    return "unknown";
}

inline DatasetKind dataset_kind_from_string(const std::string& s) {
    if (s == "spectrum") return DatasetKind::spectrum;
    if (s == "ringdown") return DatasetKind::ringdown;
    if (s == "area_vs_t") return DatasetKind::area_vs_t;
    if (s == "area_vs_v") return DatasetKind::area_vs_v;
    if (s == "snr_vs_v") return DatasetKind::snr_vs_v;
    throw config_error("kind", "unknown dataset kind '" + s + "'");
}

/// Spectrum-analyzer trace settings.
struct TraceSpec {
    std::vector<double> frequency_grid_hz;  // sorted, strictly increasing
    double rbw_hz = 1.0;
    int n_averages = 100;
    std::uint64_t seed = 0;
};

inline void validate(const TraceSpec& t) {
    if (t.frequency_grid_hz.size() < 2) throw config_error("trace", "grid needs >= 2 points");
    for (std::size_t i = 1; i < t.frequency_grid_hz.size(); ++i)
        if (!(t.frequency_grid_hz[i] > t.frequency_grid_hz[i - 1]))
            throw config_error("trace.frequency_grid", "grid must be strictly increasing");
    if (!(t.rbw_hz > 0.0)) throw config_error("trace.rbw_hz", "rbw must be positive");
    if (t.n_averages < 1) throw config_error("trace.n_averages", "n_averages must be >= 1");
}

/// Knobs for the non-spectrum generators, recorded next to the system truth.
struct SynthSettings {
    double chain_gain = 1.0;        // V per m of motion, for area datasets
    double noise_rel_sigma = 0.03;  // relative sigma of area / snr readings
    double sample_rate_hz = 0.0;    // ringdown
    double duration_s = 0.0;        // ringdown
    double ringdown_amplitude = 1.0;
    double ringdown_noise_sigma = 0.0;
    double rbw_hz = 1.0;
    int n_averages = 100;
};

struct SyntheticDataset {
    DatasetKind kind = DatasetKind::spectrum;
    std::vector<double> abscissa;  // Hz / s / K / V depending on kind
    std::vector<double> readings;
    std::vector<double> sigma;
    std::uint64_t seed = 0;
    SystemParams truth;      // full parameter record used for generation
    SynthSettings settings;
    std::vector<std::string> warnings;
};

/// One averaged spectrum-analyzer trace of the transduced sideband. Each
/// noise bin carries a Gamma(n_averages, mean 1) multiplier; a coherent rf
/// drive adds a deterministic single-bin spike of height Gtot^2 Ss / rbw.
inline SyntheticDataset gen_spectrum(const SystemParams& sys, const TraceSpec& trace) {
    validate(sys);
    validate(trace);
    SyntheticDataset ds;
    ds.kind = DatasetKind::spectrum;
    ds.seed = trace.seed;
    ds.truth = sys;
    ds.settings.rbw_hz = trace.rbw_hz;
    ds.settings.n_averages = trace.n_averages;
    ds.abscissa = trace.frequency_grid_hz;

    std::vector<double> omega(trace.frequency_grid_hz.size());
    for (std::size_t i = 0; i < omega.size(); ++i) omega[i] = hz_to_rad(trace.frequency_grid_hz[i]);
    const std::vector<double> s_true = sideband_spectrum(sys.mode, sys.cavity, sys.stack, sys.op,
                                                         omega, sys.g0_override, sys.constants);

    Rng rng(trace.seed);
    const double sigma_rel = 1.0 / std::sqrt(static_cast<double>(trace.n_averages));
    ds.readings.resize(s_true.size());
    ds.sigma.resize(s_true.size());
    for (std::size_t i = 0; i < s_true.size(); ++i) {
        ds.readings[i] = s_true[i] * rng.averaged_bin_multiplier(trace.n_averages);
        ds.sigma[i] = s_true[i] * sigma_rel;
    }

    // A drive tone lands in its nearest bin; outside the analyzer span it
    // simply does not appear.
    if (sys.op.rf_drive_psd > 0.0 && sys.op.rf_frequency > 0.0) {
        const double f_rf = rad_to_hz(sys.op.rf_frequency);
        const double half_bin = 0.5 * (trace.frequency_grid_hz[1] - trace.frequency_grid_hz[0]);
        if (f_rf >= trace.frequency_grid_hz.front() - half_bin &&
            f_rf <= trace.frequency_grid_hz.back() + half_bin) {
            std::size_t bin = 0;
            double best = std::abs(trace.frequency_grid_hz[0] - f_rf);
            for (std::size_t i = 1; i < trace.frequency_grid_hz.size(); ++i) {
                const double dist = std::abs(trace.frequency_grid_hz[i] - f_rf);
                if (dist < best) { best = dist; bin = i; }
            }
            const double gtot = total_gain(sys.mode, sys.cavity, sys.stack, sys.op,
                                           sys.op.rf_frequency, sys.g0_override, sys.constants);
            ds.readings[bin] += gtot * gtot * sys.op.rf_drive_psd / trace.rbw_hz;
        }
    }
    return ds;
}

/// Amplitude ring-down after the resonant drive is switched off. The
/// amplitude decays at Gamma_em / 2; energy decays at Gamma_em.
inline SyntheticDataset gen_ringdown(const SystemParams& sys, double sample_rate_hz,
                                     double duration_s, double amplitude, double noise_sigma,
                                     std::uint64_t seed) {
    validate(sys);
    if (!(sample_rate_hz > 0.0) || !(duration_s > 0.0))
        throw config_error("synth", "ringdown needs positive sample rate and duration");
    SyntheticDataset ds;
    ds.kind = DatasetKind::ringdown;
    ds.seed = seed;
    ds.truth = sys;
    ds.settings.sample_rate_hz = sample_rate_hz;
    ds.settings.duration_s = duration_s;
    ds.settings.ringdown_amplitude = amplitude;
    ds.settings.ringdown_noise_sigma = noise_sigma;

    const auto b = detail::bias_state(sys.mode, sys.cavity, sys.stack, sys.op, sys.g0_override,
                                      sys.constants);
    if (duration_s * b.gamma_em < 3.0)
        ds.warnings.push_back("ringdown shorter than three decay times; rate fit will be weak");

    const auto n = static_cast<std::size_t>(duration_s * sample_rate_hz) + 1;
    Rng rng(seed);
    ds.abscissa.resize(n);
    ds.readings.resize(n);
    ds.sigma.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate_hz;
        const double clean = amplitude * std::exp(-0.5 * b.gamma_em * t);
        ds.abscissa[i] = t;
        ds.readings[i] = clean + amplitude * noise_sigma * rng.normal();
        ds.sigma[i] = amplitude * noise_sigma;
    }
    return ds;
}

/// Integrated sideband areas across a temperature or bias sweep, scaled by
/// the chain gain, with multiplicative Gaussian read-out noise.
inline SyntheticDataset gen_area_series(const SystemParams& sys, DatasetKind kind,
                                        const std::vector<double>& sweep, double chain_gain,
                                        double noise_rel_sigma, std::uint64_t seed) {
    validate(sys);
    if (kind != DatasetKind::area_vs_t && kind != DatasetKind::area_vs_v)
        throw config_error("synth.kind", "area series kind must be area_vs_t or area_vs_v");
    if (sweep.empty()) throw config_error("synth.sweep_values", "sweep must be non-empty");
    SyntheticDataset ds;
    ds.kind = kind;
    ds.seed = seed;
    ds.truth = sys;
    ds.settings.chain_gain = chain_gain;
    ds.settings.noise_rel_sigma = noise_rel_sigma;

    Rng rng(seed);
    for (double value : sweep) {
        OperatingPoint op = sys.op;
        if (kind == DatasetKind::area_vs_t)
            op.temperature = value;
        else
            op.bias_voltage = value;
        const auto b = detail::bias_state(sys.mode, sys.cavity, sys.stack, op, sys.g0_override,
                                          sys.constants);
        const double area = sideband_area(sys.mode, sys.stack, op, chain_gain, b.gamma_em,
                                          sys.constants);
        ds.abscissa.push_back(value);
        ds.readings.push_back(area * (1.0 + noise_rel_sigma * rng.normal()));
        ds.sigma.push_back(area * noise_rel_sigma);
    }
    return ds;
}

/// On-resonance SNR across a bias sweep with multiplicative read-out noise.
inline SyntheticDataset gen_snr_series(const SystemParams& sys, const std::vector<double>& biases,
                                       double noise_rel_sigma, std::uint64_t seed) {
    validate(sys);
    if (biases.empty()) throw config_error("synth.sweep_values", "bias list must be non-empty");
    SyntheticDataset ds;
    ds.kind = DatasetKind::snr_vs_v;
    ds.seed = seed;
    ds.truth = sys;
    ds.settings.noise_rel_sigma = noise_rel_sigma;

    Rng rng(seed);
    for (double v : biases) {
        OperatingPoint op = sys.op;
        op.bias_voltage = v;
        const double value = snr(sys.mode, sys.cavity, sys.stack, op, sys.g0_override,
                                 sys.constants);
        ds.abscissa.push_back(v);
        ds.readings.push_back(value * (1.0 + noise_rel_sigma * rng.normal()));
        ds.sigma.push_back(value * noise_rel_sigma);
    }
    return ds;
}

}  // namespace emx

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "emx/lm.hpp"
#include "emx/model.hpp"
#include "emx/synth.hpp"
#include "emx/system.hpp"
#include "emx/units.hpp"

namespace emx {

/// One measured curve: abscissa, readings, per-point sigma (<= 0 -> unit
/// weight).
struct DataSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> sigma;
};

inline DataSeries to_series(const SyntheticDataset& ds) {
    return DataSeries{ds.abscissa, ds.readings, ds.sigma};
}

/// Named extracted quantity with its propagated uncertainty.
struct Quantity {
    std::string name;
    double value = 0.0;
    double sigma = 0.0;
    std::string unit;
};

namespace detail {

inline double weight_sigma(const DataSeries& d, std::size_t i) {
    return (i < d.sigma.size() && d.sigma[i] > 0.0) ? d.sigma[i] : 1.0;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Lorentzian peak
// ---------------------------------------------------------------------------

struct LorentzianFit {
    double center = 0.0;  // abscissa units
    double fwhm = 0.0;
    double height = 0.0;  // above the floor
    double floor = 0.0;
    double area = 0.0;    // pi/2 * height * fwhm
    double center_sigma = 0.0, fwhm_sigma = 0.0, height_sigma = 0.0, floor_sigma = 0.0,
           area_sigma = 0.0;
    bool low_significance = false;  // peak below 3 sigma over the floor
    FitResult fit;

    std::vector<Quantity> quantities() const {
        return {{"center", center, center_sigma, "x"},
                {"fwhm", fwhm, fwhm_sigma, "x"},
                {"height", height, height_sigma, "y"},
                {"floor", floor, floor_sigma, "y"},
                {"area", area, area_sigma, "y*x"}};
    }
};

/// Lorentzian on a flat floor. Initial guesses: center at the maximum bin,
/// floor at the median, width from the half-height bin count.
inline LorentzianFit fit_lorentzian(const DataSeries& d) {
    if (d.x.size() < 5) throw config_error("dataset", "lorentzian fit needs >= 5 points");

    const std::size_t peak_idx =
        static_cast<std::size_t>(std::max_element(d.y.begin(), d.y.end()) - d.y.begin());
    const double floor0 = detail::median(d.y);
    const double height0 = std::max(d.y[peak_idx] - floor0, 1e-30);
    const double spacing = (d.x.back() - d.x.front()) / static_cast<double>(d.x.size() - 1);
    std::size_t above = 0;
    for (double v : d.y)
        if (v > floor0 + 0.5 * height0) ++above;
    const double fwhm0 = std::max<double>(above, 3) * spacing;

    auto residuals = [&](const std::vector<double>& p) {
        const double hw = 0.5 * std::abs(p[1]);
        std::vector<double> r(d.x.size());
        for (std::size_t i = 0; i < d.x.size(); ++i) {
            const double dx = d.x[i] - p[0];
            const double model = p[3] + p[2] * hw * hw / (dx * dx + hw * hw);
            r[i] = (model - d.y[i]) / detail::weight_sigma(d, i);
        }
        return r;
    };

    LorentzianFit out;
    FitOptions opt;
    opt.parameter_scales = {std::max(std::abs(d.x[peak_idx]), d.x.back() - d.x.front()), fwhm0,
                            height0, height0};
    out.fit = least_squares(residuals, {d.x[peak_idx], fwhm0, height0, floor0},
                            {"center", "fwhm", "height", "floor"}, opt);
    out.center = out.fit.parameters[0];
    out.fwhm = std::abs(out.fit.parameters[1]);
    out.height = out.fit.parameters[2];
    out.floor = out.fit.parameters[3];
    out.center_sigma = out.fit.sigma(0);
    out.fwhm_sigma = out.fit.sigma(1);
    out.height_sigma = out.fit.sigma(2);
    out.floor_sigma = out.fit.sigma(3);
    out.area = 0.5 * pi * out.height * out.fwhm;
    const double cov_hw = out.fit.covariance(2, 1);
    out.area_sigma = 0.5 * pi *
                     std::sqrt(std::max(0.0, out.fwhm * out.fwhm * out.fit.covariance(2, 2) +
                                                 out.height * out.height * out.fit.covariance(1, 1) +
                                                 2.0 * out.height * out.fwhm * cov_hw));
    out.low_significance = !(out.height > 0.0) || out.height < 3.0 * out.height_sigma;
    if (out.low_significance) out.fit.warnings.push_back("peak not significant above the floor");
    const double span = d.x.back() - d.x.front();
    if (span < 5.0 * out.fwhm)
        out.fit.warnings.push_back("trace spans fewer than five linewidths");
    return out;
}

// ---------------------------------------------------------------------------
// Ring-down
// ---------------------------------------------------------------------------

struct RingdownFit {
    double energy_rate = 0.0;     // rad/s equivalent (1/s); amplitude decays at rate/2
    double energy_rate_sigma = 0.0;
    double amplitude = 0.0;
    double amplitude_sigma = 0.0;
    bool negative_rate = false;
    FitResult fit;

    std::vector<Quantity> quantities() const {
        return {{"energy_rate", energy_rate, energy_rate_sigma, "1/s"},
                {"amplitude", amplitude, amplitude_sigma, "y"}};
    }
};

/// Exponential amplitude decay; the reported rate is the energy rate, twice
/// the fitted amplitude rate.
inline RingdownFit fit_ringdown(const DataSeries& d) {
    if (d.x.size() < 10) throw config_error("dataset", "ringdown fit needs >= 10 samples");

    // Log-linear regression on the positive samples for the starting point.
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        if (!(d.y[i] > 0.0)) continue;
        const double ly = std::log(d.y[i]);
        sw += 1.0;
        swx += d.x[i];
        swy += ly;
        swxx += d.x[i] * d.x[i];
        swxy += d.x[i] * ly;
    }
    double rate0 = 1.0, amp0 = d.y.front() > 0.0 ? d.y.front() : 1.0;
    const double det = sw * swxx - swx * swx;
    if (sw >= 3 && std::abs(det) > 0.0) {
        const double slope = (sw * swxy - swx * swy) / det;
        rate0 = std::max(-slope, 1e-3 / (d.x.back() - d.x.front() + 1e-30));
        amp0 = std::exp((swy - slope * swx) / sw);
    }

    auto residuals = [&](const std::vector<double>& p) {
        std::vector<double> r(d.x.size());
        for (std::size_t i = 0; i < d.x.size(); ++i)
            r[i] = (p[0] * std::exp(-p[1] * d.x[i]) - d.y[i]) / detail::weight_sigma(d, i);
        return r;
    };

    RingdownFit out;
    FitOptions opt;
    opt.parameter_scales = {amp0, rate0};
    out.fit = least_squares(residuals, {amp0, rate0}, {"amplitude", "amplitude_rate"}, opt);
    out.amplitude = out.fit.parameters[0];
    out.amplitude_sigma = out.fit.sigma(0);
    out.energy_rate = 2.0 * out.fit.parameters[1];
    out.energy_rate_sigma = 2.0 * out.fit.sigma(1);
    out.negative_rate = !(out.fit.parameters[1] > 0.0);
    if (out.negative_rate) out.fit.warnings.push_back("non-decaying data: negative rate");
    return out;
}

// ---------------------------------------------------------------------------
// Anti-spring curve
// ---------------------------------------------------------------------------

struct AntiSpringFit {
    double gap = 0.0;  // m
    double gap_sigma = 0.0;
    double omega_m0 = 0.0;  // rad/s at zero effective bias
    double omega_m0_sigma = 0.0;
    double v0 = 0.0;  // V
    double v0_sigma = 0.0;
    FitResult fit;

    std::vector<Quantity> quantities() const {
        return {{"gap", gap, gap_sigma, "m"},
                {"omega_m0", omega_m0, omega_m0_sigma, "rad/s"},
                {"v0", v0, v0_sigma, "V"}};
    }
};

/// Mode frequency versus bias. The parabola in W^2 gives the vertex V0 and
/// the zero-bias frequency; the curvature maps to the gap through the
/// parallel-plate series network, using the prior area and bias capacitance
/// from `stack`.
inline AntiSpringFit fit_antispring(const DataSeries& d, const MechanicalMode& mode,
                                    const CapacitorStack& stack) {
    if (d.x.size() < 5) throw config_error("dataset", "anti-spring fit needs >= 5 bias points");

    // Weighted quadratic least squares on y = W^2 for the starting point.
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        const double s = detail::weight_sigma(d, i);
        const double w = 1.0 / (s * s);
        const Eigen::Vector3d row(1.0, d.x[i], d.x[i] * d.x[i]);
        ata += w * row * row.transpose();
        atb += w * row * (d.y[i] * d.y[i]);
    }
    const Eigen::Vector3d c = ata.ldlt().solve(atb);
    if (!(c(2) < 0.0))
        throw domain_error("fit_antispring", "upward curvature: not an anti-spring dataset");
    const double v0_0 = -c(1) / (2.0 * c(2));
    const double w0sq_0 = c(0) - c(1) * c(1) / (4.0 * c(2));
    const double curvature = -c(2);  // = d2C_eq/dx2 / (2 m_eff)

    // Invert curvature -> gap by bisection; d2C_eq/dx2 falls with the gap.
    const double target = 2.0 * mode.m_eff * curvature;
    auto d2c_of_gap = [&](double gap) {
        CapacitorStack s = stack;
        s.gap = gap;
        return equivalent_capacitance_dxx(s, 0.0);
    };
    double lo = 1e-9, hi = 1e-2;
    if (target > d2c_of_gap(lo) || target < d2c_of_gap(hi))
        throw domain_error("fit_antispring", "curvature outside the parallel-plate gap range");
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        (d2c_of_gap(mid) > target ? lo : hi) = mid;
    }
    const double gap0 = std::sqrt(lo * hi);

    auto residuals = [&](const std::vector<double>& p) {
        CapacitorStack s = stack;
        s.gap = p[2];
        const double b = equivalent_capacitance_dxx(s, 0.0) / (2.0 * mode.m_eff);
        std::vector<double> r(d.x.size());
        for (std::size_t i = 0; i < d.x.size(); ++i) {
            const double dv = d.x[i] - p[1];
            const double wsq = p[0] * p[0] - b * dv * dv;
            const double model = wsq > 0.0 ? std::sqrt(wsq) : 0.0;
            r[i] = (model - d.y[i]) / detail::weight_sigma(d, i);
        }
        return r;
    };

    AntiSpringFit out;
    FitOptions opt;
    opt.parameter_scales = {std::sqrt(std::max(w0sq_0, 1.0)), d.x.back() - d.x.front(), gap0};
    out.fit = least_squares(residuals, {std::sqrt(std::max(w0sq_0, 1.0)), v0_0, gap0},
                            {"omega_m0", "v0", "gap"}, opt);
    out.omega_m0 = out.fit.parameters[0];
    out.omega_m0_sigma = out.fit.sigma(0);
    out.v0 = out.fit.parameters[1];
    out.v0_sigma = out.fit.sigma(1);
    out.gap = out.fit.parameters[2];
    out.gap_sigma = out.fit.sigma(2);
    if (!(out.v0 > d.x.front() && out.v0 < d.x.back()))
        out.fit.warnings.push_back("bias sweep does not bracket the vertex");
    return out;
}

// ---------------------------------------------------------------------------
// Sideband area versus temperature / bias
// ---------------------------------------------------------------------------

struct AreaTempFit {
    double slope = 0.0;  // V^2/K (or m^2/K at unit chain gain)
    double slope_sigma = 0.0;
    double intercept = 0.0;
    double intercept_sigma = 0.0;
    double chain_gain = 0.0;  // V/m inferred by equating the slope to the model
    double chain_gain_sigma = 0.0;
    bool thermalization_failure = false;
    FitResult fit;

    std::vector<Quantity> quantities() const {
        return {{"slope", slope, slope_sigma, "V^2/K"},
                {"intercept", intercept, intercept_sigma, "V^2"},
                {"chain_gain", chain_gain, chain_gain_sigma, "V/m"}};
    }
};

/// Linear fit of integrated area versus temperature; the slope calibrates
/// the displacement-to-analyzer chain gain.
inline AreaTempFit fit_area_vs_t(const DataSeries& d, const SystemParams& sys) {
    if (d.x.size() < 3) throw config_error("dataset", "area fit needs >= 3 temperatures");

    auto residuals = [&](const std::vector<double>& p) {
        std::vector<double> r(d.x.size());
        for (std::size_t i = 0; i < d.x.size(); ++i)
            r[i] = (p[0] * d.x[i] + p[1] - d.y[i]) / detail::weight_sigma(d, i);
        return r;
    };
    const double slope0 = (d.y.back() - d.y.front()) / (d.x.back() - d.x.front());

    AreaTempFit out;
    FitOptions opt;
    opt.parameter_scales = {std::abs(slope0), std::abs(slope0) * d.x.back()};
    out.fit = least_squares(residuals, {slope0, 0.0}, {"slope", "intercept"}, opt);
    out.slope = out.fit.parameters[0];
    out.slope_sigma = out.fit.sigma(0);
    out.intercept = out.fit.parameters[1];
    out.intercept_sigma = out.fit.sigma(1);
    out.thermalization_failure = !(out.slope > 0.0);
    if (out.thermalization_failure) {
        out.fit.warnings.push_back("non-positive slope: mode not thermalized");
        return out;
    }

    // Model slope per unit chain gain at this operating point.
    OperatingPoint op = sys.op;
    op.temperature = 1.0;
    op.rf_noise_psd = 0.0;
    const auto b = detail::bias_state(sys.mode, sys.cavity, sys.stack, op, sys.g0_override,
                                      sys.constants);
    const double unit_slope = sideband_area(sys.mode, sys.stack, op, 1.0, b.gamma_em,
                                            sys.constants);
    out.chain_gain = std::sqrt(out.slope / unit_slope);
    out.chain_gain_sigma = out.slope_sigma / (2.0 * std::sqrt(out.slope * unit_slope));
    return out;
}

struct AreaBiasFit {
    double s_vv_n = 0.0;  // V^2/Hz
    double s_vv_n_sigma = 0.0;
    double s_vv_n_upper = 0.0;  // 95% upper limit when not resolved
    bool upper_limit_only = false;
    double v0 = 0.0;
    double v0_sigma = 0.0;
    FitResult fit;

    std::vector<Quantity> quantities() const {
        return {{"s_vv_n", s_vv_n, s_vv_n_sigma, "V^2/Hz"}, {"v0", v0, v0_sigma, "V"}};
    }
};

/// Area versus bias at one or more known temperatures, fitted jointly with a
/// shared bias-line noise density and charge offset. The parabola coefficient
/// carries S_vv^n; the vertex carries V0.
inline AreaBiasFit fit_area_vs_v(const std::vector<std::pair<double, DataSeries>>& curves,
                                 const SystemParams& sys, double chain_gain) {
    if (curves.empty()) throw config_error("dataset", "area-vs-bias fit needs at least one curve");
    for (const auto& [t, d] : curves)
        if (d.x.size() < 5)
            throw config_error("dataset", "area-vs-bias fit needs >= 5 bias points per curve");

    // Vertex guess from the first curve, noise guess from its extremes.
    const DataSeries& d0 = curves.front().second;
    const std::size_t imin =
        static_cast<std::size_t>(std::min_element(d0.y.begin(), d0.y.end()) - d0.y.begin());
    const double v0_0 = d0.x[imin];

    auto area_model = [&](double temperature, double bias, double s_n, double v0) {
        OperatingPoint op = sys.op;
        op.temperature = temperature;
        op.bias_voltage = bias;
        op.charge_offset_voltage = v0;
        op.rf_noise_psd = s_n;
        const auto b = detail::bias_state(sys.mode, sys.cavity, sys.stack, op, sys.g0_override,
                                          sys.constants);
        return sideband_area(sys.mode, sys.stack, op, chain_gain, b.gamma_em, sys.constants);
    };

    double sn0 = 0.0;
    {
        const double t0 = curves.front().first;
        const double a_edge = std::max(d0.y.front(), d0.y.back());
        const double v_edge = std::abs(d0.y.front() > d0.y.back() ? d0.x.front() : d0.x.back());
        const double a_th = area_model(t0, v0_0, 0.0, v0_0);
        const double probe = area_model(t0, v_edge, 1.0, v0_0) - a_th;  // area per unit S_n
        sn0 = probe > 0.0 ? std::max((a_edge - a_th) / probe, 1e-12 * a_th / probe) : 1e-18;
    }

    auto residuals = [&](const std::vector<double>& p) {
        const double s_n = std::exp(p[0]);
        std::vector<double> r;
        for (const auto& [temperature, d] : curves)
            for (std::size_t i = 0; i < d.x.size(); ++i)
                r.push_back((area_model(temperature, d.x[i], s_n, p[1]) - d.y[i]) /
                            detail::weight_sigma(d, i));
        return r;
    };

    AreaBiasFit out;
    FitOptions opt;
    double bias_span = 0.0;
    for (const auto& [t, d] : curves) bias_span = std::max(bias_span, d.x.back() - d.x.front());
    opt.parameter_scales = {1.0, bias_span};
    out.fit = least_squares(residuals, {std::log(sn0), v0_0}, {"log_s_vv_n", "v0"}, opt);
    const double log_sn = out.fit.parameters[0];
    const double log_sn_sigma = out.fit.sigma(0);
    out.v0 = out.fit.parameters[1];
    out.v0_sigma = out.fit.sigma(1);
    out.s_vv_n = std::exp(log_sn);
    out.s_vv_n_sigma = out.s_vv_n * log_sn_sigma;
    out.upper_limit_only = log_sn_sigma > 0.25;
    out.s_vv_n_upper = std::exp(log_sn + 2.0 * log_sn_sigma);
    if (out.upper_limit_only)
        out.fit.warnings.push_back("parabola coefficient consistent with zero: upper limit only");
    return out;
}

// ---------------------------------------------------------------------------
// SNR versus bias
// ---------------------------------------------------------------------------

struct SnrFit {
    double s_vv_s = 0.0;  // V^2/Hz
    double s_vv_s_sigma = 0.0;
    double s_vv_s_dbm = 0.0;
    double s_vv_n = 0.0;  // V^2/Hz
    double s_vv_n_sigma = 0.0;
    double s_vv_n_upper = 0.0;
    bool saturation_resolved = false;
    double v_extreme = 0.0;    // largest |V - V0| in the data
    double max_snr = 0.0;      // fitted model SNR at v_extreme
    double max_snr_db = 0.0;
    FitResult fit;

    std::vector<Quantity> quantities() const {
        return {{"s_vv_s", s_vv_s, s_vv_s_sigma, "V^2/Hz"},
                {"s_vv_n", s_vv_n, s_vv_n_sigma, "V^2/Hz"},
                {"max_snr_db", max_snr_db, 0.0, "dB"}};
    }
};

/// On-resonance SNR versus bias, fitted for the drive strength and the
/// bias-line noise. The remaining force-noise channels (thermal,
/// back-action, detector-equivalent) come from the model parameters; set
/// op.detector_psd from the floor-ratio extraction beforehand. The
/// bias-line noise is reported as a point estimate only when the saturation
/// bend is statistically resolved.
inline SnrFit fit_snr_vs_v(const DataSeries& d, const SystemParams& sys) {
    if (d.x.size() < 5) throw config_error("dataset", "snr fit needs >= 5 bias points");
    const double y_max = *std::max_element(d.y.begin(), d.y.end());
    const double y_min_nonzero = [&] {
        double m = y_max;
        for (std::size_t i = 0; i < d.y.size(); ++i)
            if (d.y[i] > 0.0 && std::abs(d.x[i] - sys.op.charge_offset_voltage) > 1e-12)
                m = std::min(m, d.y[i]);
        return m;
    }();
    if (!(y_max > 0.0) || y_min_nonzero / y_max > 0.5)
        throw domain_error("fit_snr_vs_v", "no linear regime resolved in the bias sweep");

    auto snr_model = [&](double bias, double s_s, double s_n) {
        OperatingPoint op = sys.op;
        op.bias_voltage = bias;
        op.rf_drive_psd = s_s;
        op.rf_noise_psd = s_n;
        return snr(sys.mode, sys.cavity, sys.stack, op, sys.g0_override, sys.constants);
    };

    // Drive guess from a mid-sweep point assuming no bias-line noise there.
    double ss0 = 0.0;
    {
        std::size_t mid = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < d.x.size(); ++i) {
            const double lever = std::abs(d.x[i] - sys.op.charge_offset_voltage);
            if (d.y[i] > 0.0 && lever > best) { best = lever; mid = i; }
        }
        const double probe = snr_model(d.x[mid], 1.0, 0.0);  // SNR at unit drive density
        ss0 = probe > 0.0 ? d.y[mid] * d.y[mid] / (probe * probe) : 1e-12;
    }
    const double sn0 = ss0 / ((1.2 * y_max) * (1.2 * y_max));

    auto residuals = [&](const std::vector<double>& p) {
        std::vector<double> r(d.x.size());
        for (std::size_t i = 0; i < d.x.size(); ++i)
            r[i] = (snr_model(d.x[i], std::exp(p[0]), std::exp(p[1])) - d.y[i]) /
                   detail::weight_sigma(d, i);
        return r;
    };

    SnrFit out;
    FitOptions opt;
    opt.parameter_scales = {1.0, 1.0};
    out.fit = least_squares(residuals, {std::log(ss0), std::log(sn0)},
                            {"log_s_vv_s", "log_s_vv_n"}, opt);
    out.s_vv_s = std::exp(out.fit.parameters[0]);
    out.s_vv_s_sigma = out.s_vv_s * out.fit.sigma(0);
    out.s_vv_s_dbm = v2_per_hz_to_dbm(out.s_vv_s, sys.cavity.line_impedance);
    const double log_sn_sigma = out.fit.sigma(1);
    out.s_vv_n = std::exp(out.fit.parameters[1]);
    out.s_vv_n_sigma = out.s_vv_n * log_sn_sigma;
    out.saturation_resolved = log_sn_sigma <= 0.25;
    out.s_vv_n_upper = std::exp(out.fit.parameters[1] + 2.0 * log_sn_sigma);
    if (!out.saturation_resolved)
        out.fit.warnings.push_back("saturation not resolved: bias-line noise is an upper limit");

    for (double v : d.x)
        if (std::abs(v - sys.op.charge_offset_voltage) >
            std::abs(out.v_extreme - sys.op.charge_offset_voltage))
            out.v_extreme = v;
    out.max_snr = snr_model(out.v_extreme, out.s_vv_s, out.s_vv_n);
    out.max_snr_db = db_from_amplitude_ratio(out.max_snr);
    return out;
}

// ---------------------------------------------------------------------------
// Detector noise from the peak/floor ratio
// ---------------------------------------------------------------------------

struct DetectorNoise {
    double s_ff_det = 0.0;  // N^2/Hz, input-referred
    double s_ff_det_sigma = 0.0;
    double ratio = 0.0;          // peak / floor
    double s_det_output = 0.0;   // V^2/Hz, the fitted floor itself
};

/// Input-referred detection noise from a zero-effective-bias spectrum: the
/// peak-to-floor ratio measures (S_th + S_ba + S_det) / S_det, so
/// S_det = (S_th + S_ba) / (ratio - 1) with the thermal term at the bare
/// bias-broadened linewidth (the same weight the displayed peak carries).
inline DetectorNoise detector_noise_from_floor(const LorentzianFit& peak,
                                               const SystemParams& sys) {
    if (!peak.fit.converged)
        throw domain_error("detector_noise_from_floor", "peak fit did not converge");
    if (!(peak.floor > 0.0))
        throw domain_error("detector_noise_from_floor", "non-positive floor");
    DetectorNoise out;
    out.ratio = (peak.floor + peak.height) / peak.floor;
    if (!(out.ratio > 1.0))
        throw domain_error("detector_noise_from_floor", "peak does not exceed the floor");

    const NoiseBudget budget =
        force_noise_budget(sys.mode, sys.cavity, sys.stack, sys.op, 0.0,
                           BudgetOptions{false}, sys.g0_override, sys.constants);
    const double numerator = budget.thermal + budget.backaction;
    out.s_ff_det = numerator / (out.ratio - 1.0);
    out.s_det_output = peak.floor;

    // First-order propagation of the height/floor uncertainties.
    const double r = out.ratio;
    const double dr_dh = 1.0 / peak.floor;
    const double dr_df = -peak.height / (peak.floor * peak.floor);
    const double var_r = dr_dh * dr_dh * peak.height_sigma * peak.height_sigma +
                         dr_df * dr_df * peak.floor_sigma * peak.floor_sigma +
                         2.0 * dr_dh * dr_df * peak.fit.covariance(2, 3);
    out.s_ff_det_sigma = numerator / ((r - 1.0) * (r - 1.0)) * std::sqrt(std::max(0.0, var_r));
    return out;
}

// ---------------------------------------------------------------------------
// Noise budget table and sensitivity summary
// ---------------------------------------------------------------------------

struct BudgetRow {
    double bias = 0.0;        // V
    double detector = 0.0;    // N^2/Hz
    double thermal_ba = 0.0;  // N^2/Hz, thermal plus back-action
    double electrical = 0.0;  // N^2/Hz
    double total = 0.0;
};

inline std::vector<BudgetRow> noise_budget_vs_v(const SystemParams& sys,
                                                const std::vector<double>& biases) {
    std::vector<BudgetRow> rows;
    rows.reserve(biases.size());
    for (double v : biases) {
        OperatingPoint op = sys.op;
        op.bias_voltage = v;
        const NoiseBudget b = force_noise_budget(sys.mode, sys.cavity, sys.stack, op, 0.0,
                                                 BudgetOptions{true}, sys.g0_override,
                                                 sys.constants);
        rows.push_back({v, b.detector_equivalent, b.thermal + b.backaction, b.electrical,
                        b.total()});
    }
    return rows;
}

/// Bias magnitude where the transduced electrical force noise crosses the
/// detector channel, if it happens below v_max.
inline std::optional<double> electrical_detector_crossover(const SystemParams& sys,
                                                           double v_max) {
    auto excess = [&](double dv) {
        OperatingPoint op = sys.op;
        op.bias_voltage = sys.op.charge_offset_voltage + dv;
        const NoiseBudget b = force_noise_budget(sys.mode, sys.cavity, sys.stack, op, 0.0,
                                                 BudgetOptions{true}, sys.g0_override,
                                                 sys.constants);
        return b.electrical - b.detector_equivalent;
    };
    if (!(excess(v_max) > 0.0)) return std::nullopt;
    double lo = 0.0, hi = v_max;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

struct SensitivityReport {
    double max_snr_db = 0.0;
    Sensitivity measured;          // from sqrt(S_s)/SNR_max
    Sensitivity ideal_gamma_m;     // thermal-limited, bare linewidth
    Sensitivity ideal_gamma_em;    // thermal-limited, cold-damped linewidth
    double gamma_m_hz = 0.0;
    double bias = 0.0;             // V where the values are quoted
};

/// Table-style summary at the extreme bias of an SNR sweep. The measured
/// sensitivity divides the fitted drive strength by the largest SNR; the
/// ideal values are the thermal-noise-limited closed forms, quoted for both
/// linewidth conventions. charge_capacitance overrides the model C_eq for
/// the charge columns when the circuit value is known independently.
inline SensitivityReport sensitivity_report(const SnrFit& snr_fit, const SystemParams& sys,
                                            double charge_capacitance = 0.0) {
    SensitivityReport rep;
    rep.max_snr_db = snr_fit.max_snr_db;
    rep.bias = snr_fit.v_extreme;
    rep.gamma_m_hz = rad_to_hz(sys.mode.gamma_m0);

    const double c_eq = charge_capacitance > 0.0 ? charge_capacitance
                                                 : equivalent_capacitance(sys.stack, 0.0);
    rep.measured.voltage = std::sqrt(snr_fit.s_vv_s) / snr_fit.max_snr;
    rep.measured.charge = charge_from_voltage_sensitivity(rep.measured.voltage, c_eq,
                                                          sys.constants);

    OperatingPoint op = sys.op;
    op.bias_voltage = snr_fit.v_extreme;
    rep.ideal_gamma_m = min_sensitivity(sys.mode, sys.stack, op, 0.0, sys.constants);
    const auto b = detail::bias_state(sys.mode, sys.cavity, sys.stack, op, sys.g0_override,
                                      sys.constants);
    rep.ideal_gamma_em = min_sensitivity(sys.mode, sys.stack, op, b.gamma_em, sys.constants);
    if (charge_capacitance > 0.0) {
        rep.ideal_gamma_m.charge =
            charge_from_voltage_sensitivity(rep.ideal_gamma_m.voltage, c_eq, sys.constants);
        rep.ideal_gamma_em.charge =
            charge_from_voltage_sensitivity(rep.ideal_gamma_em.voltage, c_eq, sys.constants);
        rep.measured.charge =
            charge_from_voltage_sensitivity(rep.measured.voltage, c_eq, sys.constants);
    }
    return rep;
}

}  // namespace emx

#pragma once

#include <cmath>
#include <string>

#include "emx/constants.hpp"
#include "emx/errors.hpp"

namespace emx {

/// Axis-aligned rectangle given by its center and full extents, in the
/// membrane coordinate frame [0, length_y] x [0, length_z].
struct Rectangle {
    double center_y = 0.0;  // m
    double center_z = 0.0;  // m
    double extent_y = 0.0;  // m, full side length
    double extent_z = 0.0;  // m
};

struct MembraneGeometry {
    double length_y = 0.0;      // m
    double length_z = 0.0;      // m
    double thickness = 0.0;     // m
    double stress = 0.0;        // Pa
    double density = 0.0;       // kg/m^3
    double metal_thickness = 0.0;  // m
    double metal_density = 0.0;    // kg/m^3
    Rectangle electrode;           // metalized region, must lie inside the membrane
};

inline void validate(const MembraneGeometry& g, const std::string& op = "geometry") {
    if (!(g.length_y > 0.0) || !(g.length_z > 0.0) || !(g.thickness > 0.0))
        throw domain_error(op, "membrane dimensions must be positive");
    if (!(g.stress > 0.0)) throw domain_error(op, "stress must be positive");
    if (!(g.density > 0.0)) throw domain_error(op, "density must be positive");
    if (g.metal_thickness < 0.0 || g.metal_density < 0.0)
        throw domain_error(op, "metal layer parameters must be non-negative");
    const auto& e = g.electrode;
    if (!(e.extent_y > 0.0) || !(e.extent_z > 0.0))
        throw domain_error(op, "electrode extents must be positive");
    if (e.center_y - 0.5 * e.extent_y < -1e-15 ||
        e.center_y + 0.5 * e.extent_y > g.length_y + 1e-15 ||
        e.center_z - 0.5 * e.extent_z < -1e-15 ||
        e.center_z + 0.5 * e.extent_z > g.length_z + 1e-15)
        throw domain_error(op, "electrode region extends outside the membrane");
}

/// Stressed-plate dispersion for a rectangular membrane:
/// w_pq = pi * sqrt((stress/density) * (p^2/ly^2 + q^2/lz^2)), in rad/s.
inline double plate_mode_frequency(const MembraneGeometry& g, int p, int q) {
    if (p < 1 || q < 1)
        throw domain_error("plate_mode_frequency", "mode indices must be >= 1");
    validate(g, "plate_mode_frequency");
    const double ky = static_cast<double>(p) / g.length_y;
    const double kz = static_cast<double>(q) / g.length_z;
    return pi * std::sqrt((g.stress / g.density) * (ky * ky + kz * kz));
}

struct EffectiveMass {
    double physical_mass = 0.0;    // kg, membrane film plus metal layer
    double quarter_mass = 0.0;     // kg
    double dilution_factor = 0.0;  // electrode-weighted fraction of mode energy
    double m_eff = 0.0;            // kg, quarter_mass / dilution_factor
};

namespace detail {

// Composite Simpson over [a, b] with n (even) intervals.
template <typename F>
double simpson(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace detail

/// Motional mass of mode (p, q) read out through the electrode region.
/// The mode shape is u_pq(y, z) = sin(p pi y / ly) sin(q pi z / lz); the
/// read-out dilution factor is the ratio of integral(u^2) over the electrode
/// to integral(u^2) over the whole membrane, evaluated by 2-D quadrature.
inline EffectiveMass effective_mass(const MembraneGeometry& g, int p, int q) {
    if (p < 1 || q < 1)
        throw domain_error("effective_mass", "mode indices must be >= 1");
    validate(g, "effective_mass");

    EffectiveMass r;
    const double film = g.length_y * g.length_z * g.thickness * g.density;
    const double metal = g.electrode.extent_y * g.electrode.extent_z *
                         g.metal_thickness * g.metal_density;
    r.physical_mass = film + metal;
    r.quarter_mass = 0.25 * r.physical_mass;

    const auto u2_1d = [](double x, double length, int idx) {
        const double s = std::sin(idx * pi * x / length);
        return s * s;
    };
    // The integrand separates; run Simpson per axis. Interval count scales
    // with the index so higher modes stay below 1e-10 quadrature error.
    const int ny = 1024 * std::max(1, p);
    const int nz = 1024 * std::max(1, q);
    const auto& e = g.electrode;
    const double num_y = detail::simpson([&](double y) { return u2_1d(y, g.length_y, p); },
                                         e.center_y - 0.5 * e.extent_y,
                                         e.center_y + 0.5 * e.extent_y, ny);
    const double num_z = detail::simpson([&](double z) { return u2_1d(z, g.length_z, q); },
                                         e.center_z - 0.5 * e.extent_z,
                                         e.center_z + 0.5 * e.extent_z, nz);
    const double den_y = detail::simpson([&](double y) { return u2_1d(y, g.length_y, p); },
                                         0.0, g.length_y, ny);
    const double den_z = detail::simpson([&](double z) { return u2_1d(z, g.length_z, q); },
                                         0.0, g.length_z, nz);
    r.dilution_factor = (num_y * num_z) / (den_y * den_z);
    r.m_eff = r.quarter_mass / r.dilution_factor;
    return r;
}

}  // namespace emx

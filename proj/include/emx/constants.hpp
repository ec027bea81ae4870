#pragma once

namespace emx {

/// CODATA 2018 values, SI base units. Immutable; the optional config-level
/// override constructs a different instance rather than mutating this one.
struct PhysicalConstants {
    double vacuum_permittivity = 8.8541878128e-12;  // F/m
    double reduced_planck      = 1.054571817e-34;   // J s
    double boltzmann           = 1.380649e-23;      // J/K
    double elementary_charge   = 1.602176634e-19;   // C
};

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

inline const PhysicalConstants& codata() {
    static const PhysicalConstants c{};
    return c;
}

}  // namespace emx

#pragma once

// Double-well trap with a narrow attractive laser dip in the centre.
//
//   V(x) = m w_H^2 x^2 / 2 + V1 exp(-x^2 / 2w^2) - I0 exp(-x^2 / 2 sigma^2)
//
// Everything downstream works in harmonic-oscillator units: lengths in
// l = sqrt(hbar / (m w_H)), energies in hbar w_H. In those units the
// potential reads x^2/2 + v1 exp(-x^2/2w^2) - i0 exp(-x^2/2sigma^2).

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "laserdip/error.hpp"

namespace laserdip {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;     // J s
inline constexpr double amu = 1.66053906660e-27;    // kg
} // namespace constants

/// SI description of the trap.
struct PhysicalParams {
    double mass = 0.0;               // kg
    double omega_h = 0.0;            // rad/s
    double barrier_height_v1 = 0.0;  // J
    double barrier_width_w = 0.0;    // m
    double dip_strength_i0 = 0.0;    // J
    double dip_width_sigma = 0.0;    // m

    /// The 87Rb setup: m = 87 amu, w_H = 2 pi 15 Hz, w = 5 um,
    /// V1 = 5 m w_H^2 w^2, sigma = 0.5 um, no dip.
    static PhysicalParams rubidium_default()
    {
        PhysicalParams p;
        p.mass = 87.0 * constants::amu;
        p.omega_h = 2.0 * std::numbers::pi * 15.0;
        p.barrier_width_w = 5.0e-6;
        p.barrier_height_v1 = 5.0 * p.mass * p.omega_h * p.omega_h * p.barrier_width_w * p.barrier_width_w;
        p.dip_width_sigma = 0.5e-6;
        p.dip_strength_i0 = 0.0;
        return p;
    }
};

/// Dimensionless potential parameters (lengths in l, energies in hbar w_H).
struct PotentialParams {
    double v1 = 0.0;
    double w = 1.0;
    double i0 = 0.0;
    double sigma = 0.1;

    PotentialParams with_i0(double dip) const
    {
        PotentialParams p = *this;
        p.i0 = dip;
        return p;
    }
};

/// Result of nondimensionalize(): the parameters plus the conversion units.
struct Nondimensionalized {
    PotentialParams params;
    double length_unit = 0.0;   // l in metres
    double energy_unit = 0.0;   // hbar w_H in joules
};

inline void validate(const PhysicalParams& p)
{
    if (!(p.mass > 0.0) || !std::isfinite(p.mass))
        throw parameter_error("mass must be positive");
    if (!(p.omega_h > 0.0) || !std::isfinite(p.omega_h))
        throw parameter_error("trap frequency must be positive");
    if (!(p.barrier_width_w > 0.0) || !(p.dip_width_sigma > 0.0))
        throw parameter_error("barrier and dip widths must be positive");
    if (!(p.dip_width_sigma < p.barrier_width_w))
        throw parameter_error("dip width must be smaller than the barrier width");
    if (!std::isfinite(p.barrier_height_v1) || !std::isfinite(p.dip_strength_i0))
        throw parameter_error("barrier height and dip strength must be finite");
}

inline void validate(const PotentialParams& p)
{
    if (!std::isfinite(p.v1) || !std::isfinite(p.w) || !std::isfinite(p.i0) || !std::isfinite(p.sigma))
        throw parameter_error("potential parameters must be finite");
    if (!(p.sigma > 0.0) || !(p.w > p.sigma))
        throw parameter_error("require w > sigma > 0");
    if (p.v1 < 0.0 || p.i0 < 0.0)
        throw parameter_error("barrier height and dip strength must be non-negative");
}

inline Nondimensionalized nondimensionalize(const PhysicalParams& p)
{
    validate(p);
    Nondimensionalized out;
    out.length_unit = std::sqrt(constants::hbar / (p.mass * p.omega_h));
    out.energy_unit = constants::hbar * p.omega_h;
    out.params.v1 = p.barrier_height_v1 / out.energy_unit;
    out.params.w = p.barrier_width_w / out.length_unit;
    out.params.i0 = p.dip_strength_i0 / out.energy_unit;
    out.params.sigma = p.dip_width_sigma / out.length_unit;
    validate(out.params);
    return out;
}

/// V(x) in hbar w_H for x in units of l. Depends on x only through x^2,
/// so evaluate(p, x) == evaluate(p, -x) bit for bit.
inline double evaluate(const PotentialParams& p, double x)
{
    const double x2 = x * x;
    return 0.5 * x2
        + p.v1 * std::exp(-x2 / (2.0 * p.w * p.w))
        - p.i0 * std::exp(-x2 / (2.0 * p.sigma * p.sigma));
}

/// dV/dx.
inline double evaluate_derivative(const PotentialParams& p, double x)
{
    const double x2 = x * x;
    const double w2 = p.w * p.w;
    const double s2 = p.sigma * p.sigma;
    return x * (1.0
        - p.v1 / w2 * std::exp(-x2 / (2.0 * w2))
        + p.i0 / s2 * std::exp(-x2 / (2.0 * s2)));
}

inline std::vector<double> sample(const PotentialParams& p, const std::vector<double>& xs)
{
    std::vector<double> v(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        v[i] = evaluate(p, xs[i]);
    return v;
}

/// Positions (x_left, x_right) of the two outer well minima, x_left = -x_right.
///
/// A coarse scan with step 0.01 on x >= 0 brackets the lowest off-centre local
/// minimum; the bracket is then refined by bisection on the sign of dV/dx,
/// which resolves the position to ~1e-13 (comparing V alone stalls near
/// sqrt(machine epsilon)).
inline std::pair<double, double> well_minima(const PotentialParams& p)
{
    validate(p);
    constexpr double step = 0.01;
    const double reach = std::sqrt(2.0 * (p.v1 + 1.0)) + 10.0 * p.w + 1.0;
    const auto count = static_cast<std::size_t>(std::ceil(reach / step)) + 2;

    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = evaluate(p, static_cast<double>(i) * step);

    std::size_t best = 0;
    for (std::size_t i = 1; i + 1 < count; ++i) {
        if (v[i] < v[i - 1] && v[i] <= v[i + 1] && (best == 0 || v[i] < v[best]))
            best = i;
    }
    if (best == 0)
        throw shape_error("potential has no off-centre minimum (barrier too low)");

    double lo = static_cast<double>(best - 1) * step;
    double hi = static_cast<double>(best + 1) * step;
    // dV/dx < 0 at lo, > 0 at hi for a smooth minimum inside the bracket.
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (evaluate_derivative(p, mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double x = 0.5 * (lo + hi);
    return {-x, x};
}

} // namespace laserdip

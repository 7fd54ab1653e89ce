#pragma once

// Finite-difference solution of
//   H = -(1/2) d^2/dx^2 + V(x)
// in harmonic-oscillator units on a symmetric uniform grid with Dirichlet walls.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "laserdip/error.hpp"
#include "laserdip/potential.hpp"
#include "laserdip/tridiagonal.hpp"

namespace laserdip {

/// Uniform grid on [-x_max, x_max] with n_points samples, both ends included.
class Grid {
public:
    Grid(double x_max, std::size_t n_points) : x_max_(x_max), n_points_(n_points)
    {
        if (!(x_max > 0.0) || !std::isfinite(x_max))
            throw parameter_error("grid half-width must be positive");
        if (n_points < 3)
            throw parameter_error("grid needs at least 3 points");
    }

    /// Default discretisation: [-12, 12] with 4097 points, so x = 0 is a node.
    static Grid standard() { return Grid(12.0, 4097); }

    double x_min() const noexcept { return -x_max_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t size() const noexcept { return n_points_; }
    double spacing() const noexcept { return 2.0 * x_max_ / static_cast<double>(n_points_ - 1); }

    /// x_i computed from whichever end is closer, so x(i) == -x(n-1-i) exactly.
    double x(std::size_t i) const noexcept
    {
        const std::size_t mirror = n_points_ - 1 - i;
        if (i <= mirror)
            return -x_max_ + static_cast<double>(i) * spacing();
        return -x(mirror);
    }

    std::vector<double> points() const
    {
        std::vector<double> xs(n_points_);
        for (std::size_t i = 0; i < n_points_; ++i) xs[i] = x(i);
        return xs;
    }

    bool has_origin() const noexcept { return n_points_ % 2 == 1; }

private:
    double x_max_;
    std::size_t n_points_;
};

enum class Parity { gerade, ungerade, none };

inline std::string_view to_string(Parity p)
{
    switch (p) {
    case Parity::gerade: return "gerade";
    case Parity::ungerade: return "ungerade";
    case Parity::none: return "none";
    }
    return "none";
}

inline constexpr double parity_tolerance = 1e-6;

struct EigenPair {
    double energy = 0.0;
    std::vector<double> wavefunction;   // grid-normalised: sum psi_i^2 * h == 1
    Parity parity = Parity::none;
};

/// Grid quadrature sum a_i b_i h.
inline double overlap(std::span<const double> a, std::span<const double> b, const Grid& grid)
{
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += static_cast<long double>(a[i]) * b[i];
    return static_cast<double>(acc * grid.spacing());
}

/// Grid matrix element <a|H|b>.
inline double matrix_element(const SymTridiagonal& h, std::span<const double> a, std::span<const double> b,
    const Grid& grid)
{
    return static_cast<double>(bilinear(h, a, b) * grid.spacing());
}

/// Second-order central differences: diag 1/h^2 + V(x_i), off-diagonal -1/(2h^2).
inline SymTridiagonal build_hamiltonian(const Grid& grid, const PotentialParams& p)
{
    const double h = grid.spacing();
    const double kinetic = 1.0 / (h * h);
    SymTridiagonal t;
    t.diag.resize(grid.size());
    t.off.assign(grid.size() - 1, -0.5 * kinetic);
    for (std::size_t i = 0; i < grid.size(); ++i)
        t.diag[i] = kinetic + evaluate(p, grid.x(i));
    return t;
}

inline Parity classify_parity(std::span<const double> psi, const Grid& grid, double tol = parity_tolerance)
{
    (void)grid;
    const std::size_t n = psi.size();
    double even = 0.0;
    double odd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        even = std::max(even, std::abs(psi[i] - psi[n - 1 - i]));
        odd = std::max(odd, std::abs(psi[i] + psi[n - 1 - i]));
    }
    if (even < tol) return Parity::gerade;
    if (odd < tol) return Parity::ungerade;
    return Parity::none;
}

/// Projects psi onto its parity sector, psi <- (psi +- P psi) / 2, and
/// restores the grid norm. H commutes exactly with the grid reflection, so
/// this only removes inverse-iteration noise; it makes the gerade and
/// ungerade members of a doublet orthogonal to rounding.
inline void symmetrize(std::vector<double>& psi, Parity parity, const Grid& grid)
{
    if (parity == Parity::none) return;
    const double sign = parity == Parity::gerade ? 1.0 : -1.0;
    const std::size_t n = psi.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        const double v = 0.5 * (psi[i] + sign * psi[n - 1 - i]);
        psi[i] = v;
        psi[n - 1 - i] = sign * v;
    }
    if (n % 2 == 1 && parity == Parity::ungerade) psi[n / 2] = 0.0;
    const double norm = std::sqrt(overlap(psi, psi, grid));
    for (double& v : psi) v /= norm;
}

/// Linear interpolation of grid samples at x (0 outside the grid).
inline double interpolate(std::span<const double> f, const Grid& grid, double x)
{
    const double s = (x - grid.x_min()) / grid.spacing();
    if (s < 0.0 || s > static_cast<double>(grid.size() - 1)) return 0.0;
    const auto i = std::min(static_cast<std::size_t>(s), grid.size() - 2);
    const double frac = s - static_cast<double>(i);
    return (1.0 - frac) * f[i] + frac * f[i + 1];
}

/// Sign convention: psi(x_left) >= 0 when |psi(x_left)| > 1e-6, otherwise
/// the first lobe from the left is positive.
inline void fix_sign(std::vector<double>& psi, const Grid& grid, std::optional<double> x_left)
{
    double reference = 0.0;
    if (x_left) {
        const double v = interpolate(psi, grid, *x_left);
        if (std::abs(v) > 1e-6) reference = v;
    }
    if (reference == 0.0) {
        double peak = 0.0;
        for (double v : psi) peak = std::max(peak, std::abs(v));
        for (double v : psi) {
            if (std::abs(v) > 1e-3 * peak) {
                reference = v;
                break;
            }
        }
    }
    if (reference < 0.0)
        for (double& v : psi) v = -v;
}

/// Sign changes among samples above 1e-10 of the peak (tails below that are
/// at the rounding level of the eigensolver).
inline std::size_t count_nodes(std::span<const double> psi)
{
    double peak = 0.0;
    for (double v : psi) peak = std::max(peak, std::abs(v));
    std::size_t nodes = 0;
    double last = 0.0;
    for (double v : psi) {
        if (std::abs(v) <= 1e-10 * peak) continue;
        if (last != 0.0 && (v > 0.0) != (last > 0.0)) ++nodes;
        last = v;
    }
    return nodes;
}

/// max_i |(H psi)_i - E psi_i|.
inline double residual(const SymTridiagonal& h, const EigenPair& pair)
{
    std::vector<long double> hpsi(pair.wavefunction.size());
    apply(h, pair.wavefunction, hpsi);
    long double worst = 0.0L;
    for (std::size_t i = 0; i < hpsi.size(); ++i) {
        const long double r = hpsi[i] - static_cast<long double>(pair.energy) * pair.wavefunction[i];
        worst = std::max(worst, r < 0 ? -r : r);
    }
    return static_cast<double>(worst);
}

/// The k lowest eigenpairs of h, ascending. Energies are the Rayleigh
/// quotients of the normalised eigenvectors; wavefunctions are sign-fixed
/// against the left well minimum when one is given. h must be mirror
/// symmetric (as build_hamiltonian produces) for the parity projection.
inline std::vector<EigenPair> lowest_eigenpairs(const SymTridiagonal& h, std::size_t k, const Grid& grid,
    std::optional<double> x_left = std::nullopt)
{
    if (k < 1 || k > grid.size())
        throw parameter_error("requested eigenpair count must lie in [1, n_points]");
    if (h.size() != grid.size())
        throw parameter_error("hamiltonian and grid sizes differ");

    const std::vector<double> values = lowest_eigenvalues(h, k);
    const auto vectors = inverse_iteration(h, values);

    const double scale = 1.0 / std::sqrt(grid.spacing());
    std::vector<EigenPair> pairs(k);
    for (std::size_t i = 0; i < k; ++i) {
        EigenPair& pair = pairs[i];
        pair.wavefunction = vectors[i];
        for (double& v : pair.wavefunction) v *= scale;
        fix_sign(pair.wavefunction, grid, x_left);
        pair.parity = classify_parity(pair.wavefunction, grid);
        symmetrize(pair.wavefunction, pair.parity, grid);
        pair.energy = matrix_element(h, pair.wavefunction, pair.wavefunction, grid);
        if (!(residual(h, pair) < 1e-9))
            throw numeric_error("eigenpair " + std::to_string(i) + " failed the residual check", i);
    }
    return pairs;
}

/// Left well minimum, or nothing when the potential has a single well.
inline std::optional<double> left_anchor(const PotentialParams& p)
{
    try {
        return well_minima(p).first;
    } catch (const shape_error&) {
        return std::nullopt;
    }
}

/// Convenience: build H for p on grid and return its k lowest eigenpairs.
inline std::vector<EigenPair> solve_lowest(const Grid& grid, const PotentialParams& p, std::size_t k)
{
    validate(p);
    return lowest_eigenpairs(build_hamiltonian(grid, p), k, grid, left_anchor(p));
}

struct SpectrumRow {
    double i0 = 0.0;
    std::vector<double> energies;
    std::vector<Parity> parities;
};

inline void require_ascending(std::span<const double> values, const char* what)
{
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1]))
            throw parameter_error(std::string(what) + " must be strictly ascending");
}

/// Lowest-k spectrum for each dip strength; p.i0 is replaced row by row.
inline std::vector<SpectrumRow> spectrum_sweep(const PotentialParams& p, std::span<const double> i0_values,
    std::size_t k, const Grid& grid = Grid::standard())
{
    require_ascending(i0_values, "i0 values");
    std::vector<SpectrumRow> rows;
    rows.reserve(i0_values.size());
    for (double i0 : i0_values) {
        std::vector<EigenPair> pairs;
        try {
            pairs = solve_lowest(grid, p.with_i0(i0), k);
        } catch (const numeric_error& e) {
            throw numeric_error(std::string(e.what()) + " at i0 = " + std::to_string(i0), e.level());
        }
        SpectrumRow row;
        row.i0 = i0;
        for (const auto& pair : pairs) {
            row.energies.push_back(pair.energy);
            row.parities.push_back(pair.parity);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace laserdip

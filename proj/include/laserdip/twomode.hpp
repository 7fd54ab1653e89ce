#pragma once

// Two-mode reduction of the single-particle spectrum: pick the doublet of
// left/right well states, build Wannier orbitals from it, and extract the
// on-site energy epsilon = <w_L|H|w_L> and tunnelling J = -<w_L|H|w_R>.

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "laserdip/error.hpp"
#include "laserdip/schrodinger.hpp"

namespace laserdip {

enum class Regime { below_resonance, above_resonance };

inline std::string_view to_string(Regime r)
{
    return r == Regime::below_resonance ? "below_resonance" : "above_resonance";
}

/// Doublet splitting must stay below this fraction of the gap to the nearest
/// excluded level for the two-mode description to be trusted.
inline constexpr double validity_threshold = 0.1;

struct DoubletSelection {
    Regime regime = Regime::below_resonance;
    EigenPair symmetric_state;
    EigenPair antisymmetric_state;
    double gap_ratio = 0.0;
    bool validity_warning = false;
};

struct TwoModeParams {
    double epsilon = 0.0;
    double j = 0.0;
    double j_half_splitting = 0.0;   // (E_anti - E_sym) / 2, cross-check of j
    Regime regime = Regime::below_resonance;
};

struct WannierPair {
    std::vector<double> left;
    std::vector<double> right;
};

/// Chooses the doublet among the three lowest levels. Below the resonance it
/// is (v1, v2) and v3 is the excluded level; above it is (v2, v3) with the
/// dip-localised v1 excluded. The regime is the one with the smaller splitting.
inline DoubletSelection select_doublet(std::span<const EigenPair> pairs, double i0)
{
    if (pairs.size() < 3)
        throw selection_error("doublet selection needs the three lowest eigenpairs");

    const double low_split = pairs[1].energy - pairs[0].energy;
    const double high_split = pairs[2].energy - pairs[1].energy;
    DoubletSelection sel;
    sel.regime = low_split <= high_split ? Regime::below_resonance : Regime::above_resonance;

    const EigenPair& a = sel.regime == Regime::below_resonance ? pairs[0] : pairs[1];
    const EigenPair& b = sel.regime == Regime::below_resonance ? pairs[1] : pairs[2];
    if (a.parity == Parity::none || b.parity == Parity::none || a.parity == b.parity)
        throw selection_error("doublet members at i0 = " + std::to_string(i0)
            + " do not carry one gerade and one ungerade label");

    sel.symmetric_state = a.parity == Parity::gerade ? a : b;
    sel.antisymmetric_state = a.parity == Parity::gerade ? b : a;
    sel.gap_ratio = sel.regime == Regime::below_resonance ? low_split / high_split : high_split / low_split;
    sel.validity_warning = !(sel.gap_ratio < validity_threshold);
    return sel;
}

/// w_left = (v_s + v_a) / sqrt 2, w_right = (v_s - v_a) / sqrt 2.
inline WannierPair wannier(const DoubletSelection& sel)
{
    const auto& s = sel.symmetric_state.wavefunction;
    const auto& a = sel.antisymmetric_state.wavefunction;
    WannierPair w;
    w.left.resize(s.size());
    w.right.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        w.left[i] = (s[i] + a[i]) / std::numbers::sqrt2;
        w.right[i] = (s[i] - a[i]) / std::numbers::sqrt2;
    }
    return w;
}

/// Fraction of the norm of f on x < 0 (the x = 0 node counts half).
inline double left_weight(std::span<const double> f, const Grid& grid)
{
    long double left = 0.0L, total = 0.0L;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const long double w = static_cast<long double>(f[i]) * f[i];
        total += w;
        const double x = grid.x(i);
        if (x < 0.0) left += w;
        else if (x == 0.0) left += 0.5L * w;
    }
    return static_cast<double>(left / total);
}

/// epsilon and J as grid matrix elements of h between the Wannier orbitals.
/// h must be the operator whose eigenpairs produced sel.
inline TwoModeParams two_mode_params(const DoubletSelection& sel, const SymTridiagonal& h, const Grid& grid)
{
    const WannierPair w = wannier(sel);
    TwoModeParams out;
    out.regime = sel.regime;
    out.epsilon = matrix_element(h, w.left, w.left, grid);
    out.j = -matrix_element(h, w.left, w.right, grid);
    out.j_half_splitting = 0.5 * (sel.antisymmetric_state.energy - sel.symmetric_state.energy);
    return out;
}

struct TunnelingRow {
    double i0 = 0.0;
    double j = 0.0;
    double j_over_j0 = 0.0;
    double epsilon = 0.0;
    double gap_ratio = 0.0;
    Regime regime = Regime::below_resonance;
    bool validity_warning = false;
    double e_sym = 0.0;
    double e_anti = 0.0;
    double j_half_splitting = 0.0;
};

/// Two-mode parameters at a single dip strength.
inline TunnelingRow tunneling_at(const PotentialParams& p, double i0, const Grid& grid)
{
    const PotentialParams q = p.with_i0(i0);
    validate(q);
    const SymTridiagonal h = build_hamiltonian(grid, q);
    const auto pairs = lowest_eigenpairs(h, 3, grid, left_anchor(q));
    const DoubletSelection sel = select_doublet(pairs, i0);
    const TwoModeParams tm = two_mode_params(sel, h, grid);

    TunnelingRow row;
    row.i0 = i0;
    row.j = tm.j;
    row.epsilon = tm.epsilon;
    row.gap_ratio = sel.gap_ratio;
    row.regime = sel.regime;
    row.validity_warning = sel.validity_warning;
    row.e_sym = sel.symmetric_state.energy;
    row.e_anti = sel.antisymmetric_state.energy;
    row.j_half_splitting = tm.j_half_splitting;
    return row;
}

/// J(i0) over an ascending list of dip strengths, normalised by J(0).
inline std::vector<TunnelingRow> sweep_tunneling(const PotentialParams& p, std::span<const double> i0_values,
    const Grid& grid = Grid::standard())
{
    require_ascending(i0_values, "i0 values");
    std::vector<TunnelingRow> rows;
    rows.reserve(i0_values.size());
    for (double i0 : i0_values) {
        try {
            rows.push_back(tunneling_at(p, i0, grid));
        } catch (const numeric_error& e) {
            throw numeric_error(std::string(e.what()) + " at i0 = " + std::to_string(i0), e.level());
        }
    }
    const double j0 = (!rows.empty() && rows.front().i0 == 0.0) ? rows.front().j : tunneling_at(p, 0.0, grid).j;
    for (auto& row : rows)
        row.j_over_j0 = row.j / j0;
    return rows;
}

} // namespace laserdip

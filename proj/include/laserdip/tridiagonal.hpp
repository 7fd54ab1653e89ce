#pragma once

// Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for the
// eigenvalues, inverse iteration for the eigenvectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "laserdip/error.hpp"

namespace laserdip {

struct SymTridiagonal {
    std::vector<double> diag;   // n entries
    std::vector<double> off;    // n-1 entries, T(i, i+1) == T(i+1, i) == off[i]

    std::size_t size() const noexcept { return diag.size(); }
};

/// y = T x, accumulated in long double.
inline void apply(const SymTridiagonal& t, std::span<const double> x, std::span<long double> y)
{
    const std::size_t n = t.size();
    for (std::size_t i = 0; i < n; ++i) {
        long double acc = static_cast<long double>(t.diag[i]) * x[i];
        if (i > 0)
            acc += static_cast<long double>(t.off[i - 1]) * x[i - 1];
        if (i + 1 < n)
            acc += static_cast<long double>(t.off[i]) * x[i + 1];
        y[i] = acc;
    }
}

/// <a|T|b> without any grid weight.
inline long double bilinear(const SymTridiagonal& t, std::span<const double> a, std::span<const double> b)
{
    std::vector<long double> tb(b.size());
    apply(t, b, tb);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += static_cast<long double>(a[i]) * tb[i];
    return acc;
}

inline double max_abs_entry(const SymTridiagonal& t)
{
    double m = 0.0;
    for (double d : t.diag) m = std::max(m, std::abs(d));
    for (double e : t.off) m = std::max(m, std::abs(e));
    return m;
}

/// Gershgorin interval containing the whole spectrum.
inline std::pair<double, double> gershgorin_bounds(const SymTridiagonal& t)
{
    const std::size_t n = t.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(t.off[i - 1]);
        if (i + 1 < n) r += std::abs(t.off[i]);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    return {lo, hi};
}

inline double pivot_floor(const SymTridiagonal& t)
{
    const double m = max_abs_entry(t);
    return std::numeric_limits<double>::min() * std::max(1.0, m * m);
}

/// Number of eigenvalues strictly below x (Sturm count of the LDL^T pivots).
inline std::size_t sturm_count(const SymTridiagonal& t, double x, double pivmin)
{
    const std::size_t n = t.size();
    std::size_t count = 0;
    double q = t.diag[0] - x;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        q = t.diag[i] - x - t.off[i - 1] * t.off[i - 1] / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

inline std::size_t sturm_count(const SymTridiagonal& t, double x)
{
    return sturm_count(t, x, pivot_floor(t));
}

/// The k smallest eigenvalues, ascending, bisected to machine precision.
/// Every Sturm count tightens the brackets of all requested indices at once.
inline std::vector<double> lowest_eigenvalues(const SymTridiagonal& t, std::size_t k)
{
    if (k > t.size())
        throw parameter_error("more eigenvalues requested than the matrix has");
    const double pivmin = pivot_floor(t);
    auto [glo, ghi] = gershgorin_bounds(t);
    const double pad = std::numeric_limits<double>::epsilon() * std::max(std::abs(glo), std::abs(ghi)) * 4.0 + pivmin;
    std::vector<double> lower(k, glo - pad);
    std::vector<double> upper(k, ghi + pad);

    auto probe = [&](double x) {
        const std::size_t c = sturm_count(t, x, pivmin);
        for (std::size_t i = 0; i < k; ++i) {
            if (i < c) upper[i] = std::min(upper[i], x);
            else lower[i] = std::max(lower[i], x);
        }
    };

    std::vector<double> values(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (int it = 0; it < 2000; ++it) {
            const double lo = lower[i];
            const double hi = upper[i];
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break;
            if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)))
                break;
            probe(mid);
        }
        values[i] = 0.5 * (lower[i] + upper[i]);
    }
    return values;
}

/// k-th smallest eigenvalue (k = 0 is the lowest).
inline double kth_eigenvalue(const SymTridiagonal& t, std::size_t k)
{
    if (k >= t.size())
        throw parameter_error("eigenvalue index out of range");
    return lowest_eigenvalues(t, k + 1).back();
}

/// LU factorisation with partial pivoting of T - shift I (the LAPACK gttrf
/// layout), carried out in extended precision.
class ShiftedTridiagonalLU {
public:
    using real = long double;

    ShiftedTridiagonalLU(const SymTridiagonal& t, double shift)
        : n_(t.size()), dl_(t.off.begin(), t.off.end()), d_(t.diag.begin(), t.diag.end()),
          du_(t.off.begin(), t.off.end()), du2_(n_ > 2 ? n_ - 2 : 0, 0.0L), swapped_(n_, false)
    {
        for (real& d : d_) d -= shift;
        const real tiny = std::numeric_limits<real>::epsilon() * std::max(max_abs_entry(t), std::abs(shift));

        for (std::size_t i = 0; i + 1 < n_; ++i) {
            if (std::abs(d_[i]) >= std::abs(dl_[i])) {
                if (d_[i] == 0.0L) d_[i] = tiny;
                const real fact = dl_[i] / d_[i];
                dl_[i] = fact;
                d_[i + 1] -= fact * du_[i];
            } else {
                const real fact = d_[i] / dl_[i];
                d_[i] = dl_[i];
                dl_[i] = fact;
                const real temp = du_[i];
                du_[i] = d_[i + 1];
                d_[i + 1] = temp - fact * d_[i + 1];
                if (i + 2 < n_) {
                    du2_[i] = du_[i + 1];
                    du_[i + 1] = -fact * du_[i + 1];
                }
                swapped_[i] = true;
            }
        }
        // Exactly singular pivots appear when the shift hits an eigenvalue;
        // inverse iteration only needs a huge, finite growth factor there.
        for (real& d : d_)
            if (std::abs(d) < tiny) d = d < 0.0L ? -tiny : tiny;
    }

    /// Solves (T - shift I) x = b in place.
    void solve(std::span<real> b) const
    {
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            if (!swapped_[i]) {
                b[i + 1] -= dl_[i] * b[i];
            } else {
                const real temp = b[i] - dl_[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            }
        }
        b[n_ - 1] /= d_[n_ - 1];
        if (n_ > 1)
            b[n_ - 2] = (b[n_ - 2] - du_[n_ - 2] * b[n_ - 1]) / d_[n_ - 2];
        for (std::size_t i = n_ < 2 ? 0 : n_ - 2; i-- > 0;)
            b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
    }

private:
    std::size_t n_;
    std::vector<real> dl_, d_, du_, du2_;
    std::vector<bool> swapped_;
};

struct InverseIterationOptions {
    double shift_offset = 1e-12;      // shift = eigenvalue + offset * max(1, |eigenvalue|)
    double cluster_gap = 1e-8;        // eigenvalues closer than this are re-orthogonalised
    int min_iterations = 3;
    int max_iterations = 12;
    std::uint64_t seed = 0x5eed5eedULL;
};

/// Unit-norm eigenvectors (Euclidean, no grid weight) for the given ascending
/// eigenvalues. Vectors whose eigenvalues lie within cluster_gap of their
/// predecessor are Gram-Schmidt orthogonalised against the cluster.
///
/// Iteration stops once the residual |T x - (x.T x) x| reaches the rounding
/// floor of the matrix. For nearly degenerate doublets the iterate itself keeps
/// wobbling at the level eps*|T|/gap while the residual is already minimal, so
/// the residual, not the change of x, is the convergence measure.
inline std::vector<std::vector<double>> inverse_iteration(const SymTridiagonal& t,
    std::span<const double> eigenvalues, const InverseIterationOptions& opt = {})
{
    using real = long double;
    const std::size_t n = t.size();
    const double norm_t = 2.0 * max_abs_entry(t);
    const double floor = 8.0 * std::numeric_limits<double>::epsilon() * norm_t;

    std::vector<std::vector<double>> vectors;
    vectors.reserve(eigenvalues.size());
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    std::size_t cluster_begin = 0;
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        const double lambda = eigenvalues[k];
        if (k == 0 || std::abs(lambda - eigenvalues[k - 1]) >= opt.cluster_gap)
            cluster_begin = k;

        const double shift = lambda + opt.shift_offset * std::max(1.0, std::abs(lambda));
        const ShiftedTridiagonalLU lu(t, shift);

        auto orthonormalise = [&](std::vector<real>& v) {
            for (std::size_t j = cluster_begin; j < k; ++j) {
                real dot = 0.0L;
                for (std::size_t i = 0; i < n; ++i) dot += vectors[j][i] * v[i];
                for (std::size_t i = 0; i < n; ++i) v[i] -= dot * vectors[j][i];
            }
            real s = 0.0L;
            for (real e : v) s += e * e;
            const real norm = std::sqrt(s);
            if (!(norm > 0.0L) || !std::isfinite(static_cast<double>(norm)))
                throw numeric_error("inverse iteration produced a degenerate iterate", k);
            for (real& e : v) e /= norm;
        };

        std::vector<real> x(n);
        for (real& v : x) v = unif(rng);
        orthonormalise(x);

        std::vector<double> best;
        double best_residual = std::numeric_limits<double>::infinity();
        std::vector<double> rounded(n);
        std::vector<long double> tx(n);
        for (int it = 0; it < opt.max_iterations; ++it) {
            lu.solve(x);
            orthonormalise(x);

            for (std::size_t i = 0; i < n; ++i) rounded[i] = static_cast<double>(x[i]);
            apply(t, rounded, tx);
            real rq = 0.0L;
            for (std::size_t i = 0; i < n; ++i) rq += rounded[i] * tx[i];
            real r = 0.0L;
            for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::abs(tx[i] - rq * rounded[i]));
            const double res = static_cast<double>(r);
            if (res < best_residual) {
                best_residual = res;
                best = rounded;
            }
            if (it + 1 >= opt.min_iterations && best_residual <= floor)
                break;
        }
        if (!(best_residual <= 1e3 * floor))
            throw numeric_error("inverse iteration did not converge for level " + std::to_string(k), k);
        vectors.push_back(std::move(best));
    }
    return vectors;
}

} // namespace laserdip

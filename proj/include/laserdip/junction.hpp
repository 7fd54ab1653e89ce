#pragma once

// Semiclassical bosonic Josephson junction.
//
// Per-particle energy      H(z, theta) = -2 j sqrt(1 - z^2) cos(theta) + (un / 2) z^2
// Equations of motion      dz/dt     = -dH/dtheta = -2 j sqrt(1 - z^2) sin(theta)
//                          dtheta/dt =  dH/dz     = (un + 2 j cos(theta) / sqrt(1 - z^2)) z
//
// with hbar = 1, z the population imbalance, theta the relative phase,
// j the tunnelling amplitude and un = U N. The factor 2 in front of j is
// deliberate and carried consistently through every formula below.

#include <array>
#include <cmath>
#include <complex>
#include <algorithm>
#include <limits>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "laserdip/error.hpp"
#include "laserdip/twomode.hpp"

namespace laserdip {

struct JunctionState {
    double z = 0.0;
    double theta = 0.0;
};

struct JunctionParams {
    double j = 1.0;
    double un = 0.0;
};

struct StateDerivative {
    double dz = 0.0;
    double dtheta = 0.0;
};

/// Maps an angle to (-pi, pi].
inline double wrap_angle(double theta)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::remainder(theta, two_pi);
    if (w <= -std::numbers::pi) w += two_pi;
    return w;
}

inline double energy(const JunctionState& s, const JunctionParams& p)
{
    if (!(std::abs(s.z) <= 1.0))
        throw domain_error("population imbalance outside [-1, 1]");
    return -2.0 * p.j * std::sqrt((1.0 - s.z) * (1.0 + s.z)) * std::cos(s.theta) + 0.5 * p.un * s.z * s.z;
}

inline StateDerivative derivatives(const JunctionState& s, const JunctionParams& p)
{
    if (!(std::abs(s.z) < 1.0))
        throw singularity_error("junction equations diverge at |z| = 1");
    const double root = std::sqrt((1.0 - s.z) * (1.0 + s.z));
    return {-2.0 * p.j * root * std::sin(s.theta), (p.un + 2.0 * p.j * std::cos(s.theta) / root) * s.z};
}

// ---------------------------------------------------------------------------
// Time integration with instantaneous parameter quenches

struct QuenchSegment {
    double duration = 0.0;
    JunctionParams params;
};

class QuenchSchedule {
public:
    QuenchSchedule() = default;
    explicit QuenchSchedule(std::vector<QuenchSegment> segments) : segments_(std::move(segments)) { validate(); }

    const std::vector<QuenchSegment>& segments() const noexcept { return segments_; }
    double total_duration() const
    {
        double t = 0.0;
        for (const auto& s : segments_) t += s.duration;
        return t;
    }

private:
    void validate() const
    {
        if (segments_.empty())
            throw parameter_error("quench schedule needs at least one segment");
        for (const auto& s : segments_) {
            if (!(s.duration > 0.0) || !std::isfinite(s.duration))
                throw parameter_error("quench segment durations must be positive");
            if (s.params.j == 0.0)
                throw degenerate_error("quench segment with j = 0");
            if (!std::isfinite(s.params.j) || !std::isfinite(s.params.un))
                throw parameter_error("junction parameters must be finite");
        }
    }

    std::vector<QuenchSegment> segments_;
};

struct IntegrationOptions {
    double dt = 1e-3;        // step in units of 1/|j| of the running segment
    double z_guard = 1e-9;   // stop once |z| >= 1 - z_guard
    std::size_t sample_stride = 1;
};

struct TrajectorySample {
    double t = 0.0;
    double z = 0.0;
    double theta = 0.0;      // unwrapped
    double energy = 0.0;
    std::size_t segment = 0;
};

struct SegmentRecord {
    JunctionParams params;
    double t_begin = 0.0;
    double t_end = 0.0;
    double step = 0.0;
    std::size_t first_sample = 0;
    std::size_t end_sample = 0;           // one past the last sample of this segment
    double max_relative_drift = 0.0;      // max |H(t) - H(t_begin)| / |H(t_begin)|
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<SegmentRecord> segments;
    bool truncated = false;               // hit the |z| -> 1 singularity
    double truncation_time = 0.0;

    std::span<const TrajectorySample> segment_samples(std::size_t k) const
    {
        const auto& s = segments.at(k);
        return std::span<const TrajectorySample>(samples).subspan(s.first_sample, s.end_sample - s.first_sample);
    }
};

inline JunctionState rk4_step(const JunctionState& s, const JunctionParams& p, double h)
{
    const auto k1 = derivatives(s, p);
    const auto k2 = derivatives({s.z + 0.5 * h * k1.dz, s.theta + 0.5 * h * k1.dtheta}, p);
    const auto k3 = derivatives({s.z + 0.5 * h * k2.dz, s.theta + 0.5 * h * k2.dtheta}, p);
    const auto k4 = derivatives({s.z + h * k3.dz, s.theta + h * k3.dtheta}, p);
    return {s.z + h / 6.0 * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz),
        s.theta + h / 6.0 * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta)};
}

/// Classical fixed-step RK4 through the schedule. (z, theta) stay continuous
/// across segment boundaries; the boundary state is recorded once at the end
/// of the old segment and once at the start of the new one.
inline Trajectory integrate(const JunctionState& s0, const QuenchSchedule& schedule, const IntegrationOptions& opt = {})
{
    if (!(opt.dt > 0.0))
        throw parameter_error("time step must be positive");
    if (!(std::abs(s0.z) < 1.0 - opt.z_guard))
        throw domain_error("initial imbalance too close to |z| = 1");
    if (schedule.segments().empty())
        throw parameter_error("empty quench schedule");
    const std::size_t stride = std::max<std::size_t>(1, opt.sample_stride);

    Trajectory traj;
    JunctionState s = s0;
    double t = 0.0;
    for (std::size_t k = 0; k < schedule.segments().size() && !traj.truncated; ++k) {
        const auto& seg = schedule.segments()[k];
        const auto steps = static_cast<std::size_t>(std::ceil(seg.duration * std::abs(seg.params.j) / opt.dt - 1e-9));
        const std::size_t n_steps = std::max<std::size_t>(1, steps);
        const double h = seg.duration / static_cast<double>(n_steps);

        SegmentRecord rec;
        rec.params = seg.params;
        rec.t_begin = t;
        rec.step = h;
        rec.first_sample = traj.samples.size();
        const double e0 = energy(s, seg.params);
        const double scale = std::abs(e0) > 0.0 ? std::abs(e0) : 1.0;
        traj.samples.push_back({t, s.z, s.theta, e0, k});

        for (std::size_t i = 1; i <= n_steps; ++i) {
            JunctionState next;
            try {
                next = rk4_step(s, seg.params, h);
            } catch (const singularity_error&) {
                traj.truncated = true;
            }
            if (!traj.truncated && !(std::abs(next.z) < 1.0 - opt.z_guard))
                traj.truncated = true;
            if (traj.truncated) {
                traj.truncation_time = t;
                if (traj.samples.back().t != t)
                    traj.samples.push_back({t, s.z, s.theta, energy(s, seg.params), k});
                break;
            }
            s = next;
            t = rec.t_begin + static_cast<double>(i) * h;
            const double e = energy(s, seg.params);
            rec.max_relative_drift = std::max(rec.max_relative_drift, std::abs(e - e0) / scale);
            if (i % stride == 0 || i == n_steps)
                traj.samples.push_back({t, s.z, s.theta, e, k});
        }
        rec.t_end = t;
        rec.end_sample = traj.samples.size();
        traj.segments.push_back(rec);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Fixed points and their linear stability

enum class FixedPointLabel { X1, X2, X3plus, X3minus, X4plus, X4minus };
enum class FixedPointKind { josephson, pi_mode, self_trapped };

inline std::string_view to_string(FixedPointLabel l)
{
    switch (l) {
    case FixedPointLabel::X1: return "X1";
    case FixedPointLabel::X2: return "X2";
    case FixedPointLabel::X3plus: return "X3plus";
    case FixedPointLabel::X3minus: return "X3minus";
    case FixedPointLabel::X4plus: return "X4plus";
    case FixedPointLabel::X4minus: return "X4minus";
    }
    return "?";
}

inline std::string_view to_string(FixedPointKind k)
{
    switch (k) {
    case FixedPointKind::josephson: return "josephson";
    case FixedPointKind::pi_mode: return "pi_mode";
    case FixedPointKind::self_trapped: return "self_trapped";
    }
    return "?";
}

struct FixedPoint {
    FixedPointLabel label = FixedPointLabel::X1;
    double z_bar = 0.0;
    double theta_bar = 0.0;
    double one_minus_z2 = 1.0;   // 1 - z_bar^2 kept exactly; (2j/un)^2 on the finite-imbalance branch
    bool exists = false;
    bool stable = false;
    double omega = 0.0;
    double bracket = 0.0;        // signed radicand of the eigenvalue formula
    FixedPointKind kind = FixedPointKind::josephson;
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Linearisation of the equations of motion at an existing fixed point.
inline Matrix2 stability_matrix(const FixedPoint& fp, const JunctionParams& p)
{
    if (!fp.exists)
        throw domain_error("stability matrix requested for a non-existent fixed point");
    if (!(fp.one_minus_z2 > 0.0))
        throw singularity_error("fixed point at |z| = 1");
    const double root = std::sqrt(fp.one_minus_z2);
    const double s = std::sin(fp.theta_bar);
    const double c = std::cos(fp.theta_bar);
    const double diag = 2.0 * p.j * fp.z_bar * s / root;
    return {{{diag, -2.0 * p.j * root * c},
        {p.un + 2.0 * p.j * c / (fp.one_minus_z2 * root), -diag}}};
}

struct Eigenfrequency {
    std::complex<double> lambda;   // the root with non-negative imaginary (or real) part
    double bracket = 0.0;
    bool stable = false;
    double omega = 0.0;
};

/// lambda = +-i sqrt(4 j^2 [cos(2 theta)/(1 - z^2) + (un / 2j) sqrt(1 - z^2) cos(theta)]).
/// Marginally stable (a centre) when the bracket is non-negative; omega = Im lambda.
inline Eigenfrequency eigen_frequencies(const FixedPoint& fp, const JunctionParams& p)
{
    if (!fp.exists)
        throw domain_error("eigenfrequencies requested for a non-existent fixed point");
    if (!(fp.one_minus_z2 > 0.0))
        throw singularity_error("fixed point at |z| = 1");
    const double root = std::sqrt(fp.one_minus_z2);
    const double bracket = 4.0 * p.j * p.j
        * (std::cos(2.0 * fp.theta_bar) / fp.one_minus_z2 + p.un / (2.0 * p.j) * root * std::cos(fp.theta_bar));
    Eigenfrequency out;
    out.bracket = bracket;
    out.stable = bracket >= 0.0;
    if (out.stable) {
        out.omega = std::sqrt(bracket);
        out.lambda = {0.0, out.omega};
    } else {
        out.lambda = {std::sqrt(-bracket), 0.0};
    }
    return out;
}

/// All six labelled stationary points. X1 = (0, 0) and X2 = (0, pi) always
/// exist. The finite-imbalance pairs +-sqrt(1 - (2j/un)^2) exist iff
/// un^2 > 4 j^2: at theta = 0 (X3) when j un < 0 and at theta = pi (X4) when
/// j un > 0. Absent points are returned with exists = false.
inline std::vector<FixedPoint> fixed_points(const JunctionParams& p)
{
    if (p.j == 0.0)
        throw degenerate_error("fixed points undefined for j = 0");

    std::vector<FixedPoint> out;
    auto add = [&](FixedPointLabel label, double z, double theta, double one_minus_z2, bool exists,
                   FixedPointKind kind) {
        FixedPoint fp;
        fp.label = label;
        fp.z_bar = z;
        fp.theta_bar = theta;
        fp.one_minus_z2 = one_minus_z2;
        fp.exists = exists;
        fp.kind = kind;
        if (exists) {
            const auto ev = eigen_frequencies(fp, p);
            fp.stable = ev.stable;
            fp.omega = ev.omega;
            fp.bracket = ev.bracket;
        } else {
            fp.bracket = p.un * p.un - 4.0 * p.j * p.j;
        }
        out.push_back(fp);
    };

    constexpr double pi = std::numbers::pi;
    add(FixedPointLabel::X1, 0.0, 0.0, 1.0, true, FixedPointKind::josephson);
    add(FixedPointLabel::X2, 0.0, pi, 1.0, true, FixedPointKind::pi_mode);

    const bool finite = p.un * p.un > 4.0 * p.j * p.j;
    const double ratio = finite ? 2.0 * p.j / p.un : 0.0;
    const double omz2 = finite ? ratio * ratio : 1.0;
    const double zb = finite ? std::sqrt((1.0 - ratio) * (1.0 + ratio)) : 0.0;
    const bool at_zero = finite && p.j * p.un < 0.0;
    const bool at_pi = finite && p.j * p.un > 0.0;
    add(FixedPointLabel::X3plus, at_zero ? zb : 0.0, 0.0, at_zero ? omz2 : 1.0, at_zero, FixedPointKind::self_trapped);
    add(FixedPointLabel::X3minus, at_zero ? -zb : 0.0, 0.0, at_zero ? omz2 : 1.0, at_zero, FixedPointKind::self_trapped);
    add(FixedPointLabel::X4plus, at_pi ? zb : 0.0, pi, at_pi ? omz2 : 1.0, at_pi, FixedPointKind::self_trapped);
    add(FixedPointLabel::X4minus, at_pi ? -zb : 0.0, pi, at_pi ? omz2 : 1.0, at_pi, FixedPointKind::self_trapped);
    return out;
}

struct CriticalImbalance {
    double z_c = 0.0;
    bool clamped = false;
};

/// Largest initial imbalance z(0) (with theta(0) = 0) that stays self-trapped:
/// z_c = (2 / gamma) sqrt(gamma - 1) for gamma = |un / 2j| > 1.
inline CriticalImbalance critical_imbalance(double gamma)
{
    if (!(gamma > 1.0) || !std::isfinite(gamma))
        throw domain_error("self-trapping needs gamma = |un / 2j| > 1");
    CriticalImbalance out;
    out.z_c = 2.0 / gamma * std::sqrt(gamma - 1.0);
    if (out.z_c > 1.0) {
        out.z_c = 1.0;
        out.clamped = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Trajectory classification

enum class TrajectoryKind { josephson, self_trapped };

inline std::string_view to_string(TrajectoryKind k)
{
    return k == TrajectoryKind::josephson ? "josephson" : "self_trapped";
}

struct TrajectoryClass {
    TrajectoryKind kind = TrajectoryKind::self_trapped;
    double mean_z = 0.0;
    bool stationary = false;   // z == 0 throughout: no sign change, but no trapping either
};

/// Josephson iff z changes sign; otherwise self-trapped. The samples must
/// span at least one linear period 2 pi / omega of the stable fixed point
/// nearest to the trajectory's mean phase-space position.
inline TrajectoryClass classify_samples(std::span<const TrajectorySample> samples, const JunctionParams& p)
{
    if (samples.size() < 2)
        throw inconclusive_error("trajectory has fewer than two samples");

    TrajectoryClass out;
    long double sum_z = 0.0L;
    double sum_sin = 0.0, sum_cos = 0.0;
    bool positive = false, negative = false, all_zero = true;
    for (const auto& s : samples) {
        sum_z += s.z;
        sum_sin += std::sin(s.theta);
        sum_cos += std::cos(s.theta);
        positive = positive || s.z > 0.0;
        negative = negative || s.z < 0.0;
        all_zero = all_zero && s.z == 0.0;
    }
    out.mean_z = static_cast<double>(sum_z / static_cast<long double>(samples.size()));
    if (all_zero) {
        out.kind = TrajectoryKind::self_trapped;
        out.stationary = true;
        return out;
    }

    const double mean_theta = std::atan2(sum_sin, sum_cos);
    double best_distance = std::numeric_limits<double>::infinity();
    double omega = 0.0;
    for (const auto& fp : fixed_points(p)) {
        if (!fp.exists || !fp.stable || !(fp.omega > 0.0)) continue;
        const double dz = fp.z_bar - out.mean_z;
        const double dt = wrap_angle(fp.theta_bar - mean_theta);
        const double d = dz * dz + dt * dt;
        if (d < best_distance) {
            best_distance = d;
            omega = fp.omega;
        }
    }
    const double span = samples.back().t - samples.front().t;
    if (!(omega > 0.0) || span < 2.0 * std::numbers::pi / omega)
        throw inconclusive_error("trajectory shorter than one oscillation period");

    out.kind = (positive && negative) ? TrajectoryKind::josephson : TrajectoryKind::self_trapped;
    return out;
}

inline TrajectoryClass classify_trajectory(const Trajectory& traj, std::size_t segment)
{
    return classify_samples(traj.segment_samples(segment), traj.segments.at(segment).params);
}

// ---------------------------------------------------------------------------
// Oscillation frequencies along a tunnelling sweep

struct FrequencyRow {
    double i0 = 0.0;
    double j = 0.0;
    bool validity_warning = false;
    double omega_j = 0.0;       // X1, theta = 0
    double bracket_j = 0.0;
    bool stable_j = false;
    double omega_pi = 0.0;      // X2, theta = pi
    double bracket_pi = 0.0;
    bool stable_pi = false;
    double omega_st = 0.0;      // finite-imbalance pair
    double bracket_st = 0.0;    // un^2 - 4 j^2
    bool exists_st = false;
};

inline std::vector<FrequencyRow> frequency_sweep(std::span<const TunnelingRow> sweep, double un)
{
    std::vector<FrequencyRow> rows;
    rows.reserve(sweep.size());
    for (const auto& t : sweep) {
        FrequencyRow r;
        r.i0 = t.i0;
        r.j = t.j;
        r.validity_warning = t.validity_warning;
        const JunctionParams p{t.j, un};
        const auto fps = fixed_points(p);
        r.bracket_j = fps[0].bracket;
        r.stable_j = fps[0].stable;
        r.omega_j = fps[0].omega;
        r.bracket_pi = fps[1].bracket;
        r.stable_pi = fps[1].stable;
        r.omega_pi = fps[1].omega;
        r.bracket_st = un * un - 4.0 * t.j * t.j;
        for (std::size_t k = 2; k < fps.size(); ++k) {
            if (fps[k].exists) {
                r.exists_st = true;
                r.omega_st = fps[k].omega;
                r.bracket_st = fps[k].bracket;
                break;
            }
        }
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Phase portrait

struct PortraitGrid {
    std::vector<double> z;
    std::vector<double> theta;
    std::vector<double> energy;   // row-major: energy[iz * theta.size() + it]

    double at(std::size_t iz, std::size_t it) const { return energy[iz * theta.size() + it]; }
};

/// H(z, theta) on [-1, 1] x [-pi, pi], both ends included.
inline PortraitGrid phase_portrait(const JunctionParams& p, std::size_t n_z, std::size_t n_theta)
{
    if (n_z < 2 || n_theta < 2)
        throw parameter_error("phase portrait needs at least 2 samples per axis");
    PortraitGrid g;
    g.z.resize(n_z);
    g.theta.resize(n_theta);
    for (std::size_t i = 0; i < n_z; ++i)
        g.z[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n_z - 1);
    for (std::size_t i = 0; i < n_theta; ++i)
        g.theta[i] = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_theta - 1);
    g.energy.resize(n_z * n_theta);
    for (std::size_t i = 0; i < n_z; ++i)
        for (std::size_t k = 0; k < n_theta; ++k)
            g.energy[i * n_theta + k] = energy({g.z[i], g.theta[k]}, p);
    return g;
}

} // namespace laserdip

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "laserdip/junction.hpp"

using namespace laserdip;

namespace {

constexpr double pi = std::numbers::pi;

FixedPoint at(const JunctionParams& p, FixedPointLabel label)
{
    for (const auto& fp : fixed_points(p))
        if (fp.label == label) return fp;
    throw std::logic_error("label missing");
}

FixedPoint point(double z, double theta)
{
    FixedPoint fp;
    fp.z_bar = z;
    fp.theta_bar = theta;
    fp.one_minus_z2 = (1.0 - z) * (1.0 + z);
    fp.exists = true;
    return fp;
}

Trajectory run(const JunctionState& s0, const JunctionParams& p, double duration, double dt = 1e-3)
{
    IntegrationOptions opt;
    opt.dt = dt;
    return integrate(s0, QuenchSchedule({{duration, p}}), opt);
}

// Mean period from upward zero crossings of z - z_ref.
double measured_frequency(const Trajectory& traj, double z_ref)
{
    std::vector<double> crossings;
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const double a = traj.samples[i - 1].z - z_ref;
        const double b = traj.samples[i].z - z_ref;
        if (a < 0.0 && b >= 0.0) {
            const double f = a / (a - b);
            crossings.push_back(traj.samples[i - 1].t + f * (traj.samples[i].t - traj.samples[i - 1].t));
        }
    }
    if (crossings.size() < 21) return 0.0;
    const double period = (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
    return 2.0 * pi / period;
}

double closed_form_bracket(FixedPointLabel label, const JunctionParams& p)
{
    const double r = p.un / (2.0 * p.j);
    switch (label) {
    case FixedPointLabel::X1: return 4.0 * p.j * p.j * (1.0 + r);
    case FixedPointLabel::X2: return 4.0 * p.j * p.j * (1.0 - r);
    default: return p.un * p.un - 4.0 * p.j * p.j;
    }
}

} // namespace

TEST(Junction, WrapAngle)
{
    EXPECT_DOUBLE_EQ(wrap_angle(0.5), 0.5);
    EXPECT_DOUBLE_EQ(wrap_angle(pi), pi);
    EXPECT_DOUBLE_EQ(wrap_angle(-pi), pi);
    EXPECT_NEAR(wrap_angle(3.0 * pi + 0.25), -pi + 0.25, 1e-12);
    EXPECT_NEAR(wrap_angle(-7.0), -7.0 + 2.0 * pi, 1e-12);
}

TEST(Junction, EnergyDomain)
{
    EXPECT_DOUBLE_EQ(energy({0.0, 0.0}, {1.0, 0.0}), -2.0);
    EXPECT_DOUBLE_EQ(energy({1.0, 0.3}, {1.0, 4.0}), 2.0);
    EXPECT_THROW(energy({1.0 + 1e-12, 0.0}, {1.0, 0.0}), domain_error);
    EXPECT_THROW(derivatives({1.0, 0.0}, {1.0, 0.0}), singularity_error);
}

TEST(Junction, ClosedFormValues)
{
    EXPECT_DOUBLE_EQ(energy({0.0, pi}, {1.5, 0.0}), 3.0);
    EXPECT_DOUBLE_EQ(energy({-1.0, 2.0}, {1.0, 3.5}), 1.75);
    const auto d = derivatives({0.5, 0.0}, {1.0, 3.5});
    EXPECT_EQ(d.dz, 0.0);
    EXPECT_DOUBLE_EQ(d.dtheta, (3.5 + 2.0 / std::sqrt(0.75)) * 0.5);
    const auto m = stability_matrix(at({1.0, 0.0}, FixedPointLabel::X1), {1.0, 0.0});
    EXPECT_EQ(m, (Matrix2{{{0.0, -2.0}, {2.0, 0.0}}}));
}

TEST(Junction, RestingAtOriginStaysThere)
{
    for (const JunctionParams p : {JunctionParams{1.0, 3.5}, JunctionParams{-2.0, 0.5}}) {
        const auto traj = run({0.0, 0.0}, p, 20.0);
        for (const auto& s : traj.samples) {
            ASSERT_LT(std::abs(s.z), 1e-12);
            ASSERT_LT(std::abs(s.theta), 1e-12);
        }
    }
}

// The equations of motion are Hamilton's equations for H(z, theta).
TEST(Junction, DerivativesAreHamiltonGradients)
{
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> zs(-0.95, 0.95), ts(-pi, pi), js(-3.0, 3.0), us(-10.0, 10.0);
    const double h = 1e-6;
    for (int k = 0; k < 1000; ++k) {
        const JunctionParams p{js(rng), us(rng)};
        const JunctionState s{zs(rng), ts(rng)};
        const auto d = derivatives(s, p);
        const double dh_dtheta = (energy({s.z, s.theta + h}, p) - energy({s.z, s.theta - h}, p)) / (2.0 * h);
        const double dh_dz = (energy({s.z + h, s.theta}, p) - energy({s.z - h, s.theta}, p)) / (2.0 * h);
        ASSERT_NEAR(d.dz, -dh_dtheta, 1e-6 * (1.0 + std::abs(d.dz)));
        ASSERT_NEAR(d.dtheta, dh_dz, 1e-6 * (1.0 + std::abs(d.dtheta)));
    }
}

TEST(FixedPoints, Existence)
{
    const auto below = fixed_points({1.0, 1.0});
    ASSERT_EQ(below.size(), 6u);
    EXPECT_TRUE(below[0].exists);
    EXPECT_TRUE(below[1].exists);
    for (std::size_t k = 2; k < 6; ++k) EXPECT_FALSE(below[k].exists);

    const auto attractive = fixed_points({1.0, -3.5});
    EXPECT_TRUE(at({1.0, -3.5}, FixedPointLabel::X3plus).exists);
    EXPECT_FALSE(at({1.0, -3.5}, FixedPointLabel::X4plus).exists);
    const auto repulsive = at({1.0, 3.5}, FixedPointLabel::X4minus);
    EXPECT_TRUE(repulsive.exists);
    EXPECT_DOUBLE_EQ(repulsive.theta_bar, pi);
    EXPECT_NEAR(repulsive.z_bar, -std::sqrt(1.0 - 1.0 / (1.75 * 1.75)), 1e-15);
    EXPECT_THROW(fixed_points({0.0, 1.0}), degenerate_error);
}

TEST(FixedPoints, AreStationary)
{
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> js(-3.0, 3.0), us(-20.0, 20.0);
    for (int k = 0; k < 1000; ++k) {
        const JunctionParams p{js(rng), us(rng)};
        if (p.j == 0.0) continue;
        for (const auto& fp : fixed_points(p)) {
            if (!fp.exists || !(std::abs(fp.z_bar) < 1.0)) continue;
            const auto d = derivatives({fp.z_bar, fp.theta_bar}, p);
            const double scale = std::abs(p.j) + std::abs(p.un);
            ASSERT_LT(std::abs(d.dz), 1e-12 * scale);
            ASSERT_LT(std::abs(d.dtheta), 1e-9 * scale);
        }
    }
}

TEST(Stability, GeneralFormReducesToClosedForms)
{
    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> mag(0.05, 5.0), us(-20.0, 20.0), coin(0.0, 1.0);
    int checked = 0;
    for (int k = 0; k < 1000; ++k) {
        const double j = coin(rng) < 0.5 ? -mag(rng) : mag(rng);
        const JunctionParams p{j, us(rng)};
        for (const auto& fp : fixed_points(p)) {
            if (!fp.exists) continue;
            const double expected = closed_form_bracket(fp.label, p);
            const double scale = 4.0 * p.j * p.j + p.un * p.un;
            ASSERT_NEAR(fp.bracket, expected, 1e-12 * scale) << to_string(fp.label);
            ASSERT_EQ(fp.stable, fp.bracket >= 0.0);
            if (fp.stable) {
                ASSERT_NEAR(fp.omega, std::sqrt(expected), 1e-12 * std::sqrt(scale));
            }
            ++checked;
        }
    }
    EXPECT_GT(checked, 2000);
}

TEST(Stability, MatrixDeterminantIsBracket)
{
    std::mt19937_64 rng(1111);
    std::uniform_real_distribution<double> js(-3.0, 3.0), us(-20.0, 20.0);
    for (int k = 0; k < 500; ++k) {
        const JunctionParams p{js(rng), us(rng)};
        for (const auto& fp : fixed_points(p)) {
            if (!fp.exists) continue;
            const auto m = stability_matrix(fp, p);
            const double trace = m[0][0] + m[1][1];
            const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            const double scale = 4.0 * p.j * p.j + p.un * p.un;
            ASSERT_NEAR(trace, 0.0, 1e-12 * scale);
            ASSERT_NEAR(det, fp.bracket, 1e-12 * scale);
        }
    }
}

TEST(Stability, MatrixMatchesFiniteDifferenceJacobian)
{
    std::mt19937_64 rng(1212);
    std::uniform_real_distribution<double> zs(-0.9, 0.9), ts(-pi, pi), js(-3.0, 3.0), us(-10.0, 10.0);
    const double h = 1e-6;
    auto check = [&](const FixedPoint& fp, const JunctionParams& p) {
        const auto m = stability_matrix(fp, p);
        const auto dzp = derivatives({fp.z_bar + h, fp.theta_bar}, p);
        const auto dzm = derivatives({fp.z_bar - h, fp.theta_bar}, p);
        const auto dtp = derivatives({fp.z_bar, fp.theta_bar + h}, p);
        const auto dtm = derivatives({fp.z_bar, fp.theta_bar - h}, p);
        const double fd[2][2] = {{(dzp.dz - dzm.dz) / (2 * h), (dtp.dz - dtm.dz) / (2 * h)},
            {(dzp.dtheta - dzm.dtheta) / (2 * h), (dtp.dtheta - dtm.dtheta) / (2 * h)}};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                ASSERT_NEAR(m[a][b], fd[a][b], 1e-6 * (1.0 + std::abs(fd[a][b])));
    };
    for (int k = 0; k < 500; ++k) {
        const JunctionParams p{js(rng), us(rng)};
        for (const auto& fp : fixed_points(p))
            if (fp.exists && std::abs(fp.z_bar) < 0.99) check(fp, p);
        check(point(zs(rng), ts(rng)), p);
    }
}

TEST(Stability, BoundariesResolved)
{
    for (double j : {1.0, -0.7, 2.5}) {
        const double lo = 1.0 - 1e-9, hi = 1.0 + 1e-9;
        // X1 changes stability at un / 2j = -1, X2 at +1
        EXPECT_TRUE(at({j, -2.0 * j * lo}, FixedPointLabel::X1).stable);
        EXPECT_FALSE(at({j, -2.0 * j * hi}, FixedPointLabel::X1).stable);
        EXPECT_TRUE(at({j, 2.0 * j * lo}, FixedPointLabel::X2).stable);
        EXPECT_FALSE(at({j, 2.0 * j * hi}, FixedPointLabel::X2).stable);
        // the finite-imbalance pair appears exactly beyond |un / 2j| = 1
        EXPECT_FALSE(at({j, -2.0 * j * lo}, FixedPointLabel::X3plus).exists);
        EXPECT_TRUE(at({j, -2.0 * j * hi}, FixedPointLabel::X3plus).exists);
        EXPECT_FALSE(at({j, 2.0 * j * lo}, FixedPointLabel::X4plus).exists);
        EXPECT_TRUE(at({j, 2.0 * j * hi}, FixedPointLabel::X4plus).exists);
        EXPECT_TRUE(at({j, 2.0 * j * hi}, FixedPointLabel::X4plus).stable);
    }
}

TEST(Stability, LinearResponseFrequency)
{
    const JunctionParams cases[] = {{1.0, 0.0}, {1.0, 3.5}, {1.0, -3.5}, {-1.0, 3.5}, {0.5, 1.5}, {2.0, -9.0}};
    int measured = 0;
    for (const auto& p : cases) {
        for (const auto& fp : fixed_points(p)) {
            if (!fp.exists || !fp.stable || !(fp.omega > 0.0)) continue;
            const double periods = 25.0;
            const auto traj = run({fp.z_bar + 1e-3, fp.theta_bar}, p, periods * 2.0 * pi / fp.omega);
            ASSERT_FALSE(traj.truncated);
            const double omega = measured_frequency(traj, fp.z_bar);
            EXPECT_NEAR(omega / fp.omega, 1.0, 0.01) << to_string(fp.label) << " j = " << p.j << " un = " << p.un;
            ++measured;
        }
    }
    EXPECT_GE(measured, 12);
}

TEST(Schedule, Validation)
{
    EXPECT_THROW(QuenchSchedule(std::vector<QuenchSegment>{}), parameter_error);
    EXPECT_THROW(QuenchSchedule({{10.0, {1.0, 3.5}}, {0.0, {-1.0, 3.5}}}), parameter_error);
    EXPECT_THROW(QuenchSchedule(std::vector<QuenchSegment>{{-1.0, {1.0, 3.5}}}), parameter_error);
    EXPECT_THROW(QuenchSchedule(std::vector<QuenchSegment>{{1.0, {0.0, 3.5}}}), degenerate_error);
    EXPECT_DOUBLE_EQ(QuenchSchedule({{10.0, {1.0, 3.5}}, {5.0, {-1.0, 3.5}}}).total_duration(), 15.0);
}

namespace {

double max_abs_z(const Trajectory& traj)
{
    double m = 0.0;
    for (const auto& s : traj.samples) m = std::max(m, std::abs(s.z));
    return m;
}

} // namespace

// Orbits that stay away from |z| = 1 conserve H to 1e-8 at dt = 1e-3; near
// the poles the phase velocity grows like 1/sqrt(1 - z^2), so everywhere else
// only fourth-order convergence is asserted.
TEST(Integrate, EnergyConservedPerSegment)
{
    std::mt19937_64 rng(1313);
    std::uniform_real_distribution<double> zs(-0.8, 0.8), ts(-pi, pi), us(-4.0, 4.0), coin(0.0, 1.0);
    int tight = 0;
    for (int k = 0; k < 60; ++k) {
        const JunctionParams p{coin(rng) < 0.5 ? -1.0 : 1.0, us(rng)};
        const JunctionState s0{zs(rng), ts(rng)};
        const auto coarse = run(s0, p, 100.0, 2e-3);
        const auto fine = run(s0, p, 100.0, 1e-3);
        if (coarse.truncated || fine.truncated) continue;
        const double d_coarse = coarse.segments[0].max_relative_drift;
        const double d_fine = fine.segments[0].max_relative_drift;
        if (d_coarse > 1e-12) {
            ASSERT_LT(d_fine, d_coarse / 8.0) << "j = " << p.j << " un = " << p.un;
        }
        if (max_abs_z(fine) < 0.9) {
            ASSERT_LT(d_fine, 1e-8) << "j = " << p.j << " un = " << p.un;
            ++tight;
        }
    }
    EXPECT_GT(tight, 30);
}

TEST(Integrate, TimeReversal)
{
    std::mt19937_64 rng(1414);
    std::uniform_real_distribution<double> zs(-0.7, 0.7), ts(-pi, pi), us(-4.0, 4.0);
    for (int k = 0; k < 50; ++k) {
        const JunctionParams p{1.0, us(rng)};
        const JunctionState s0{zs(rng), ts(rng)};
        const auto fwd = run(s0, p, 5.0);
        if (fwd.truncated) continue;
        const auto& end = fwd.samples.back();
        const auto back = run({end.z, -end.theta}, p, 5.0);
        ASSERT_NEAR(back.samples.back().z, s0.z, 1e-6);
        ASSERT_NEAR(back.samples.back().theta, -s0.theta, 1e-6);
    }
}

TEST(Integrate, MirrorSymmetry)
{
    std::mt19937_64 rng(1515);
    std::uniform_real_distribution<double> zs(-0.7, 0.7), ts(-pi, pi), us(-4.0, 4.0);
    for (int k = 0; k < 50; ++k) {
        const JunctionParams p{-1.0, us(rng)};
        const JunctionState s0{zs(rng), ts(rng)};
        const auto a = run(s0, p, 5.0);
        const auto b = run({-s0.z, -s0.theta}, p, 5.0);
        ASSERT_EQ(a.samples.size(), b.samples.size());
        for (std::size_t i = 0; i < a.samples.size(); ++i) {
            ASSERT_NEAR(b.samples[i].z, -a.samples[i].z, 1e-14);
            ASSERT_NEAR(b.samples[i].theta, -a.samples[i].theta, 1e-14);
        }
    }
}

TEST(Integrate, SegmentBookkeeping)
{
    IntegrationOptions opt;
    opt.sample_stride = 10;
    const auto traj = integrate({0.5, 0.0}, QuenchSchedule({{10.0, {1.0, 3.5}}, {10.0, {-1.0, 3.5}}}), opt);
    ASSERT_EQ(traj.segments.size(), 2u);
    EXPECT_FALSE(traj.truncated);
    EXPECT_EQ(traj.samples.front().t, 0.0);
    EXPECT_NEAR(traj.samples.back().t, 20.0, 1e-12);
    const auto first = traj.segment_samples(0);
    const auto second = traj.segment_samples(1);
    EXPECT_EQ(first.back().t, second.front().t);
    EXPECT_EQ(first.back().z, second.front().z);
    EXPECT_EQ(first.size(), 1001u);
    for (const auto& s : second) EXPECT_EQ(s.segment, 1u);
}

TEST(Integrate, TruncatesAtSingularity)
{
    // H = 0 level of the free junction runs into |z| = 1
    const auto traj = run({0.5, -pi / 2}, {1.0, 0.0}, 5.0);
    EXPECT_TRUE(traj.truncated);
    EXPECT_GT(traj.truncation_time, 0.0);
    EXPECT_LT(traj.truncation_time, 5.0);
    EXPECT_LT(std::abs(traj.samples.back().z), 1.0);
    EXPECT_THROW(run({1.0, 0.0}, {1.0, 0.0}, 1.0), domain_error);
}

TEST(Classify, QuenchSegments)
{
    const auto traj = integrate({0.5, 0.0}, QuenchSchedule({{10.0, {1.0, 3.5}}, {10.0, {-1.0, 3.5}}}));
    EXPECT_EQ(classify_trajectory(traj, 0).kind, TrajectoryKind::josephson);
    const auto second = classify_trajectory(traj, 1);
    EXPECT_EQ(second.kind, TrajectoryKind::self_trapped);
    EXPECT_GT(second.mean_z, 0.0);
}

TEST(Classify, StationaryAndInconclusive)
{
    const auto still = run({0.0, 0.0}, {1.0, 2.0}, 5.0);
    const auto c = classify_trajectory(still, 0);
    EXPECT_TRUE(c.stationary);
    const auto short_run = run({0.3, 0.0}, {1.0, 2.0}, 0.1);
    EXPECT_THROW(classify_trajectory(short_run, 0), inconclusive_error);
}

TEST(SelfTrapping, CriticalImbalance)
{
    const auto zc = critical_imbalance(1.75);
    EXPECT_NEAR(zc.z_c, 2.0 / 1.75 * std::sqrt(0.75), 1e-15);
    EXPECT_NEAR(zc.z_c, 0.9897433186, 1e-9);
    EXPECT_FALSE(zc.clamped);
    EXPECT_EQ(critical_imbalance(2.0).z_c, 1.0);
    EXPECT_NEAR(critical_imbalance(1.0 + 1e-8).z_c, 2.0 * std::sqrt(1e-8), 1e-11);
    EXPECT_THROW(critical_imbalance(1.0), domain_error);
    EXPECT_THROW(critical_imbalance(0.5), domain_error);
}

TEST(SelfTrapping, ThresholdSeparatesRegimes)
{
    const double zc = critical_imbalance(1.75).z_c;
    for (const JunctionParams p : {JunctionParams{1.0, -3.5}, JunctionParams{-1.0, 3.5}}) {
        for (double f : {0.5, 0.9, 0.99}) {
            const auto traj = run({f * zc, 0.0}, p, 20.0);
            ASSERT_FALSE(traj.truncated);
            EXPECT_EQ(classify_trajectory(traj, 0).kind, TrajectoryKind::self_trapped) << f;
        }
        for (double z0 : {1.01 * zc, 0.5 * (zc + 1.0)}) {
            const auto traj = run({z0, 0.0}, p, 20.0);
            ASSERT_FALSE(traj.truncated);
            EXPECT_EQ(classify_trajectory(traj, 0).kind, TrajectoryKind::josephson) << z0;
        }
    }
}

TEST(FrequencySweep, BranchProperties)
{
    const double un = 1.2e-5;
    std::vector<TunnelingRow> rows;
    for (int k = -200; k <= 200; ++k) {
        if (k == 0) continue;
        TunnelingRow r;
        r.i0 = k;
        r.j = 1e-7 * k;
        rows.push_back(r);
    }
    const auto out = frequency_sweep(rows, un);
    ASSERT_EQ(out.size(), rows.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& r = out[i];
        EXPECT_EQ(r.exists_st, un * un > 4.0 * r.j * r.j);
        EXPECT_EQ(r.stable_j, r.bracket_j >= 0.0);
        EXPECT_EQ(r.stable_pi, r.bracket_pi >= 0.0);
        EXPECT_EQ(r.omega_j, r.stable_j ? std::sqrt(r.bracket_j) : 0.0);
        EXPECT_EQ(r.omega_pi, r.stable_pi ? std::sqrt(r.bracket_pi) : 0.0);
        if (r.exists_st) {
            EXPECT_NEAR(r.omega_st, std::sqrt(un * un - 4.0 * r.j * r.j), 1e-18);
        }
        if (i == 0 || out[i - 1].j * r.j < 0.0) continue;
        // continuous in j: omega^2 is the bracket, whose slope in j is below
        // 8|j| + 2|un| < 2e-4, so steps of 1e-7 move it by under 2e-11
        const auto& prev = out[i - 1];
        if (prev.stable_j && r.stable_j) {
            EXPECT_LT(std::abs(r.omega_j * r.omega_j - prev.omega_j * prev.omega_j), 2e-11);
        } else if (prev.stable_j != r.stable_j) {
            EXPECT_LT(std::max(r.omega_j, prev.omega_j), std::sqrt(2e-11));
        }
        if (prev.stable_pi && r.stable_pi) {
            EXPECT_LT(std::abs(r.omega_pi * r.omega_pi - prev.omega_pi * prev.omega_pi), 2e-11);
        } else if (prev.stable_pi != r.stable_pi) {
            EXPECT_LT(std::max(r.omega_pi, prev.omega_pi), std::sqrt(2e-11));
        }
    }
}

TEST(Portrait, GridAndQuenchRelabelling)
{
    const auto pre = phase_portrait({1.0, 3.5}, 21, 41);
    const auto post = phase_portrait({-1.0, 3.5}, 21, 41);
    EXPECT_EQ(pre.z.front(), -1.0);
    EXPECT_EQ(pre.z.back(), 1.0);
    EXPECT_NEAR(pre.theta.front(), -pi, 1e-15);
    for (std::size_t iz = 0; iz < 21; ++iz)
        for (std::size_t it = 0; it + 20 < 41; ++it)
            ASSERT_NEAR(post.at(iz, it), pre.at(iz, it + 20), 1e-12);
    EXPECT_THROW(phase_portrait({1.0, 0.0}, 1, 10), parameter_error);
}

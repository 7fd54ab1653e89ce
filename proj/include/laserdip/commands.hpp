#pragma once

// The four pipeline commands behind the laserdip CLI. Each validates the run
// configuration, computes, and writes its data files into config.output_dir.

#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "laserdip/config.hpp"
#include "laserdip/io.hpp"
#include "laserdip/junction.hpp"
#include "laserdip/schrodinger.hpp"
#include "laserdip/twomode.hpp"

namespace laserdip {

struct CommandResult {
    std::vector<std::filesystem::path> files;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
};

namespace detail {

inline Metadata base_metadata(const RunConfig& cfg, const Nondimensionalized& nd)
{
    return {
        {"v1", format_number(nd.params.v1)},
        {"w", format_number(nd.params.w)},
        {"sigma", format_number(nd.params.sigma)},
        {"i0", format_number(nd.params.i0)},
        {"length_unit_m", format_number(nd.length_unit)},
        {"energy_unit_J", format_number(nd.energy_unit)},
        {"x_max", format_number(cfg.x_max)},
        {"n_points", std::to_string(cfg.n_points)},
        {"units", "lengths in l = sqrt(hbar/(m omega_h)), energies in hbar omega_h"},
    };
}

inline std::string join(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
    return s;
}

inline std::filesystem::path emit(const RunConfig& cfg, const std::string& stem, const std::string& title,
    const Metadata& meta, const Table& table)
{
    const std::filesystem::path dir(cfg.output_dir);
    if (cfg.format == OutputFormat::json) {
        const auto path = dir / (stem + ".json");
        write_table_json(path, title, meta, table);
        return path;
    }
    const auto path = dir / (stem + ".csv");
    write_csv(path, title, meta, table);
    return path;
}

inline nlohmann::ordered_json fixed_point_report(const JunctionParams& p, const Metadata& meta)
{
    nlohmann::ordered_json doc;
    doc["parameters"] = metadata_json(meta);
    doc["j"] = p.j;
    doc["un"] = p.un;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& fp : fixed_points(p)) {
        nlohmann::ordered_json o;
        o["label"] = std::string(to_string(fp.label));
        o["z_bar"] = fp.z_bar;
        o["theta_bar"] = fp.theta_bar;
        o["exists"] = fp.exists;
        o["stable"] = fp.stable;
        o["omega"] = fp.omega;
        o["bracket"] = fp.bracket;
        o["kind"] = std::string(to_string(fp.kind));
        arr.push_back(std::move(o));
    }
    doc["fixed_points"] = std::move(arr);
    return doc;
}

} // namespace detail

/// Potential samples and the lowest three wavefunctions for every i0 in
/// i0_list, plus the E(i0) table over the sweep range.
inline CommandResult cmd_spectrum(const RunConfig& cfg)
{
    if (cfg.i0_list.empty())
        throw usage_error("spectrum needs a non-empty i0_list");
    cfg.validate();
    const auto nd = cfg.potential();
    const Grid grid = cfg.grid();
    const auto xs = grid.points();
    CommandResult res;

    Metadata meta = detail::base_metadata(cfg, nd);
    meta.emplace_back("i0_list", detail::join(cfg.i0_list));

    Table pot;
    pot.columns.push_back("x");
    std::vector<std::vector<double>> columns;
    for (double i0 : cfg.i0_list) {
        pot.columns.push_back("V_i0_" + format_number(i0));
        columns.push_back(sample(nd.params.with_i0(i0), xs));
    }
    Metadata pot_meta = meta;
    for (double i0 : cfg.i0_list) {
        const auto pairs = solve_lowest(grid, nd.params.with_i0(i0), 3);
        std::vector<double> e;
        for (const auto& p : pairs) e.push_back(p.energy);
        pot_meta.emplace_back("energies_i0_" + format_number(i0), detail::join(e));

        Metadata wf_meta = meta;
        wf_meta.emplace_back("wavefunction_i0", format_number(i0));
        Table wf;
        wf.columns = {"x", "v1", "v2", "v3"};
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            wf_meta.emplace_back("E" + std::to_string(k + 1), format_number(pairs[k].energy));
            wf_meta.emplace_back("parity" + std::to_string(k + 1), std::string(to_string(pairs[k].parity)));
        }
        for (std::size_t i = 0; i < xs.size(); ++i)
            wf.rows.push_back({xs[i], pairs[0].wavefunction[i], pairs[1].wavefunction[i], pairs[2].wavefunction[i]});
        res.files.push_back(detail::emit(cfg, "wavefunctions_i0_" + format_number(i0),
            "lowest three eigenfunctions, grid-normalised", wf_meta, wf));
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::vector<Cell> row{xs[i]};
        for (const auto& c : columns) row.emplace_back(c[i]);
        pot.rows.push_back(std::move(row));
    }
    res.files.insert(res.files.begin(),
        detail::emit(cfg, "potential", "trap potential V(x) per dip strength", pot_meta, pot));

    const auto sweep = cfg.sweep_values();
    const auto rows = spectrum_sweep(nd.params, sweep, 3, grid);
    Table tab;
    tab.columns = {"i0", "e1", "e2", "e3", "parity1", "parity2", "parity3"};
    for (const auto& r : rows) {
        tab.rows.push_back({r.i0, r.energies[0], r.energies[1], r.energies[2], std::string(to_string(r.parities[0])),
            std::string(to_string(r.parities[1])), std::string(to_string(r.parities[2]))});
    }
    Metadata sweep_meta = detail::base_metadata(cfg, nd);
    sweep_meta.emplace_back("i0_range", format_number(cfg.i0_min) + ":" + format_number(cfg.i0_step) + ":"
        + format_number(cfg.i0_max));
    res.files.push_back(detail::emit(cfg, "spectrum_sweep", "three lowest energies versus i0", sweep_meta, tab));
    res.summary["rows"] = rows.size();
    return res;
}

inline Table tunneling_table(const std::vector<TunnelingRow>& rows)
{
    Table tab;
    tab.columns = {"i0", "j", "j_over_j0", "epsilon", "gap_ratio", "regime", "validity_warning"};
    for (const auto& r : rows)
        tab.rows.push_back({r.i0, r.j, r.j_over_j0, r.epsilon, r.gap_ratio, std::string(to_string(r.regime)),
            r.validity_warning});
    return tab;
}

/// Tunnelling amplitude J(i0) over the sweep range.
inline CommandResult cmd_sweep(const RunConfig& cfg)
{
    cfg.validate();
    const auto nd = cfg.potential();
    const auto rows = sweep_tunneling(nd.params, cfg.sweep_values(), cfg.grid());
    Metadata meta = detail::base_metadata(cfg, nd);
    meta.emplace_back("i0_range", format_number(cfg.i0_min) + ":" + format_number(cfg.i0_step) + ":"
        + format_number(cfg.i0_max));
    meta.emplace_back("validity_threshold", format_number(validity_threshold));
    CommandResult res;
    res.files.push_back(detail::emit(cfg, "tunneling", "two-mode parameters versus i0", meta, tunneling_table(rows)));

    std::size_t sign_changes = 0, flagged = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && (rows[i].j > 0.0) != (rows[i - 1].j > 0.0)) ++sign_changes;
        if (rows[i].validity_warning) ++flagged;
    }
    res.summary["rows"] = rows.size();
    res.summary["sign_changes"] = sign_changes;
    res.summary["flagged_rows"] = flagged;
    return res;
}

/// Two-segment quench: un/j = un_over_j with j = +1 until t_switch, then j -> -1.
inline CommandResult cmd_quench(const RunConfig& cfg)
{
    cfg.validate();
    const JunctionParams pre{1.0, cfg.un_over_j};
    const JunctionParams post{-1.0, cfg.un_over_j};
    const QuenchSchedule schedule({{cfg.t_switch, pre}, {cfg.t_total - cfg.t_switch, post}});
    IntegrationOptions opt;
    opt.dt = cfg.dt;
    opt.sample_stride = cfg.sample_stride;
    const Trajectory traj = integrate({cfg.z0, cfg.theta0}, schedule, opt);

    Metadata meta{
        {"z0", format_number(cfg.z0)},
        {"theta0", format_number(cfg.theta0)},
        {"un_over_j", format_number(cfg.un_over_j)},
        {"j_pre", format_number(pre.j)},
        {"j_post", format_number(post.j)},
        {"t_switch", format_number(cfg.t_switch)},
        {"t_total", format_number(cfg.t_total)},
        {"dt", format_number(cfg.dt)},
        {"units", "time in 1/|J|, energies per particle in |J|"},
        {"truncated", traj.truncated ? "1" : "0"},
    };
    CommandResult res;

    Table tab;
    tab.columns = {"t", "z", "theta_wrapped", "energy", "segment_index"};
    for (const auto& s : traj.samples)
        tab.rows.push_back({s.t, s.z, wrap_angle(s.theta), s.energy, static_cast<double>(s.segment)});
    res.files.push_back(detail::emit(cfg, "trajectory", "quench trajectory", meta, tab));

    for (const auto& [name, p] : {std::pair{"pre", pre}, std::pair{"post", post}}) {
        const auto grid = phase_portrait(p, cfg.portrait_nz, cfg.portrait_ntheta);
        Metadata pm = meta;
        pm.emplace_back("j", format_number(p.j));
        pm.emplace_back("un", format_number(p.un));
        pm.emplace_back("rows", "z from -1 to 1, " + std::to_string(cfg.portrait_nz) + " samples");
        pm.emplace_back("columns", "theta from -pi to pi, " + std::to_string(cfg.portrait_ntheta) + " samples");
        const auto path = std::filesystem::path(cfg.output_dir) / ("portrait_" + std::string(name) + ".csv");
        write_matrix_csv(path, "energy landscape H(z, theta)", pm, grid.energy, grid.z.size(), grid.theta.size());
        res.files.push_back(path);

        const auto fp_path = std::filesystem::path(cfg.output_dir) / ("fixed_points_" + std::string(name) + ".json");
        write_json(fp_path, detail::fixed_point_report(p, pm));
        res.files.push_back(fp_path);
    }

    auto segs = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < traj.segments.size(); ++k) {
        const auto& rec = traj.segments[k];
        nlohmann::ordered_json o;
        o["index"] = k;
        o["j"] = rec.params.j;
        o["un"] = rec.params.un;
        o["t_begin"] = rec.t_begin;
        o["t_end"] = rec.t_end;
        o["max_relative_energy_drift"] = rec.max_relative_drift;
        try {
            const auto c = classify_trajectory(traj, k);
            o["classification"] = std::string(to_string(c.kind));
            o["mean_z"] = c.mean_z;
            o["stationary"] = c.stationary;
        } catch (const inconclusive_error&) {
            o["classification"] = "inconclusive";
        }
        segs.push_back(std::move(o));
    }
    res.summary["parameters"] = metadata_json(meta);
    res.summary["truncated"] = traj.truncated;
    res.summary["truncation_time"] = traj.truncation_time;
    res.summary["segments"] = segs;
    const auto summary_path = std::filesystem::path(cfg.output_dir) / "quench_summary.json";
    write_json(summary_path, res.summary);
    res.files.push_back(summary_path);
    return res;
}

/// Small-oscillation frequencies of the fixed points along the J(i0) sweep.
inline CommandResult cmd_freq(const RunConfig& cfg)
{
    cfg.validate();
    const auto nd = cfg.potential();
    const auto sweep = sweep_tunneling(nd.params, cfg.sweep_values(), cfg.grid());
    const auto rows = frequency_sweep(sweep, cfg.un);

    Metadata meta = detail::base_metadata(cfg, nd);
    meta.emplace_back("i0_range", format_number(cfg.i0_min) + ":" + format_number(cfg.i0_step) + ":"
        + format_number(cfg.i0_max));
    meta.emplace_back("un", format_number(cfg.un));
    Table tab;
    tab.columns = {"i0", "j", "omega_j", "bracket_j", "stable_j", "omega_pi", "bracket_pi", "stable_pi", "omega_st",
        "bracket_st", "exists_st", "validity_warning"};
    for (const auto& r : rows)
        tab.rows.push_back({r.i0, r.j, r.omega_j, r.bracket_j, r.stable_j, r.omega_pi, r.bracket_pi, r.stable_pi,
            r.omega_st, r.bracket_st, r.exists_st, r.validity_warning});
    CommandResult res;
    res.files.push_back(detail::emit(cfg, "frequencies", "fixed-point oscillation frequencies versus i0", meta, tab));
    res.summary["rows"] = rows.size();
    return res;
}

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_numeric = 2;
inline constexpr int exit_usage = 64;

/// Process exit status for an exception escaping a command.
inline int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const usage_error*>(&e) || dynamic_cast<const parameter_error*>(&e)
        || dynamic_cast<const degenerate_error*>(&e))
        return exit_usage;
    if (dynamic_cast<const io_error*>(&e) || dynamic_cast<const std::filesystem::filesystem_error*>(&e))
        return exit_failure;
    if (dynamic_cast<const error*>(&e))
        return exit_numeric;
    return exit_failure;
}

} // namespace laserdip

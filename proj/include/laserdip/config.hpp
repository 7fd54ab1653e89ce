#pragma once

// Plain key-value run configuration.
//
//   # comment
//   mass_amu   = 87
//   omega_h_hz = 15
//   i0_list    = 0, 2, 4, 8
//
// Every key has a default; unknown keys are rejected.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "laserdip/error.hpp"
#include "laserdip/potential.hpp"
#include "laserdip/schrodinger.hpp"

namespace laserdip {

using KeyValues = std::map<std::string, std::string>;

namespace detail {
inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}
} // namespace detail

/// Parses "key = value" lines; '#' starts a comment.
inline KeyValues parse_key_values(std::istream& in)
{
    KeyValues kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw usage_error("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        if (key.empty())
            throw usage_error("config line " + std::to_string(line_no) + ": empty key");
        kv[key] = detail::trim(line.substr(eq + 1));
    }
    return kv;
}

inline KeyValues load_key_values(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw usage_error("cannot open config file " + path);
    return parse_key_values(in);
}

inline double parse_number(const std::string& key, const std::string& text)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw usage_error("key " + key + ": '" + text + "' is not a number");
    }
    if (detail::trim(text.substr(used)).size() != 0 || !std::isfinite(v))
        throw usage_error("key " + key + ": '" + text + "' is not a finite number");
    return v;
}

inline std::vector<double> parse_number_list(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = detail::trim(item);
        if (item.empty()) continue;
        out.push_back(parse_number(key, item));
    }
    return out;
}

enum class OutputFormat { csv, json };

struct RunConfig {
    // trap, SI-flavoured inputs
    double mass_amu = 87.0;
    double omega_h_hz = 15.0;
    double v1_scale = 5.0;      // V1 = v1_scale * m omega_h^2 w^2
    double w_um = 5.0;
    double sigma_um = 0.5;
    double i0 = 0.0;            // hbar omega_h

    // discretisation
    double x_max = 12.0;
    std::size_t n_points = 4097;

    // dip strengths
    std::vector<double> i0_list{0.0, 2.0, 4.0, 8.0};
    double i0_min = 0.0;
    double i0_max = 24.0;
    double i0_step = 0.02;

    // quench (times in 1/|J|, J = 1)
    double z0 = 0.5;
    double theta0 = 0.0;
    double un_over_j = 3.5;
    double t_switch = 10.0;
    double t_total = 20.0;
    double dt = 1e-3;
    std::size_t sample_stride = 10;
    std::size_t portrait_nz = 201;
    std::size_t portrait_ntheta = 201;

    // frequency sweep: U N in hbar omega_h
    double un = 1.2e-5;

    std::string output_dir = ".";
    OutputFormat format = OutputFormat::csv;

    PhysicalParams physical() const
    {
        PhysicalParams p;
        p.mass = mass_amu * constants::amu;
        p.omega_h = 2.0 * std::numbers::pi * omega_h_hz;
        p.barrier_width_w = w_um * 1e-6;
        p.dip_width_sigma = sigma_um * 1e-6;
        p.barrier_height_v1 = v1_scale * p.mass * p.omega_h * p.omega_h * p.barrier_width_w * p.barrier_width_w;
        p.dip_strength_i0 = i0 * constants::hbar * p.omega_h;
        return p;
    }

    Nondimensionalized potential() const { return nondimensionalize(physical()); }
    Grid grid() const { return Grid(x_max, n_points); }

    std::vector<double> sweep_values() const
    {
        const auto n = static_cast<std::size_t>(std::floor((i0_max - i0_min) / i0_step + 1e-9));
        std::vector<double> v(n + 1);
        for (std::size_t k = 0; k <= n; ++k)
            v[k] = i0_min + static_cast<double>(k) * i0_step;
        return v;
    }

    /// Checks every invariant before any computation starts.
    void validate() const
    {
        if (v1_scale < 0.0)
            throw parameter_error("v1_scale must be non-negative");
        if (i0 < 0.0)
            throw parameter_error("i0 must be non-negative");
        (void)potential();
        (void)grid();
        if (!(i0_step > 0.0) || !(i0_max >= i0_min) || i0_min < 0.0)
            throw parameter_error("sweep range needs i0_step > 0 and 0 <= i0_min <= i0_max");
        for (double v : i0_list)
            if (v < 0.0)
                throw parameter_error("i0_list entries must be non-negative");
        if (!(std::abs(z0) < 1.0))
            throw parameter_error("z0 must lie inside (-1, 1)");
        if (!(dt > 0.0))
            throw parameter_error("dt must be positive");
        if (!(t_switch > 0.0) || !(t_total > t_switch))
            throw parameter_error("quench needs 0 < t_switch < t_total (both segments of positive duration)");
        if (portrait_nz < 2 || portrait_ntheta < 2)
            throw parameter_error("portrait grids need at least 2 samples per axis");
    }

    /// Overrides fields from key-value pairs; unknown keys are a usage error.
    void apply(const KeyValues& kv)
    {
        for (const auto& [key, value] : kv) {
            auto num = [&] { return parse_number(key, value); };
            auto count = [&] {
                const double v = num();
                if (v < 0.0 || v != std::floor(v))
                    throw usage_error("key " + key + " must be a non-negative integer");
                return static_cast<std::size_t>(v);
            };
            if (key == "mass_amu") mass_amu = num();
            else if (key == "omega_h_hz") omega_h_hz = num();
            else if (key == "v1_scale") v1_scale = num();
            else if (key == "w_um") w_um = num();
            else if (key == "sigma_um") sigma_um = num();
            else if (key == "i0") i0 = num();
            else if (key == "x_max") x_max = num();
            else if (key == "n_points") n_points = count();
            else if (key == "i0_list") i0_list = parse_number_list(key, value);
            else if (key == "i0_min") i0_min = num();
            else if (key == "i0_max") i0_max = num();
            else if (key == "i0_step") i0_step = num();
            else if (key == "z0") z0 = num();
            else if (key == "theta0") theta0 = num();
            else if (key == "un_over_j") un_over_j = num();
            else if (key == "t_switch") t_switch = num();
            else if (key == "t_total") t_total = num();
            else if (key == "dt") dt = num();
            else if (key == "sample_stride") sample_stride = count();
            else if (key == "portrait_nz") portrait_nz = count();
            else if (key == "portrait_ntheta") portrait_ntheta = count();
            else if (key == "un") un = num();
            else if (key == "output_dir") output_dir = value;
            else if (key == "format") {
                if (value == "csv") format = OutputFormat::csv;
                else if (value == "json") format = OutputFormat::json;
                else throw usage_error("format must be csv or json");
            } else {
                throw usage_error("unknown config key '" + key + "'");
            }
        }
    }

    static const std::vector<std::string>& keys()
    {
        static const std::vector<std::string> k{"mass_amu", "omega_h_hz", "v1_scale", "w_um", "sigma_um", "i0",
            "x_max", "n_points", "i0_list", "i0_min", "i0_max", "i0_step", "z0", "theta0", "un_over_j", "t_switch",
            "t_total", "dt", "sample_stride", "portrait_nz", "portrait_ntheta", "un", "output_dir", "format"};
        return k;
    }
};

} // namespace laserdip

// laserdip: spectrum | sweep | quench | freq
//
// Exit codes: 0 ok, 2 numeric failure, 64 usage or parameter error, 1 I/O.

#include <cstdio>
#include <exception>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "laserdip/laserdip.hpp"

using Command = laserdip::CommandResult (*)(const laserdip::RunConfig&);

int main(int argc, char** argv)
{
    CLI::App app{"Double-well spectrum, tunnelling and Josephson-junction dynamics"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("-c,--config", config_path, "key = value configuration file");

    // one option per config key; flags given on the command line win over the file
    std::map<std::string, std::string> overrides;
    for (const auto& key : laserdip::RunConfig::keys())
        app.add_option("--" + key, overrides[key], "override config key " + key);

    const std::map<std::string, Command> commands{
        {"spectrum", laserdip::cmd_spectrum},
        {"sweep", laserdip::cmd_sweep},
        {"quench", laserdip::cmd_quench},
        {"freq", laserdip::cmd_freq},
    };
    app.add_subcommand("spectrum", "potential, wavefunctions and E(i0)");
    app.add_subcommand("sweep", "tunnelling amplitude J(i0)");
    app.add_subcommand("quench", "two-segment junction quench");
    app.add_subcommand("freq", "fixed-point frequencies along the J(i0) sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return laserdip::exit_usage;
    }

    try {
        laserdip::RunConfig cfg;
        if (!config_path.empty())
            cfg.apply(laserdip::load_key_values(config_path));
        laserdip::KeyValues given;
        for (const auto& [key, value] : overrides)
            if (app.count("--" + key) > 0) given[key] = value;
        cfg.apply(given);

        const auto result = commands.at(app.get_subcommands().front()->get_name())(cfg);
        for (const auto& path : result.files)
            std::printf("%s\n", path.string().c_str());
        return laserdip::exit_ok;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "laserdip: %s\n", e.what());
        return laserdip::exit_code_for(e);
    }
}

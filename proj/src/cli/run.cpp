#include "helitube/cli.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>

namespace helitube::cli {

int run(int argc, char** argv) {
    CLI::App app{"helitube: geometry, potentials and bands of a particle on a helical tube"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    Entries flags;
    app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
        app.add_option_function<std::string>(
            name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
    };
    flag("--kappa", "kappa", "curvature of the base helix");
    flag("--tau", "tau", "torsion of the base helix");
    flag("--rho0", "rho0", "tube radius");
    flag("--s0", "s0", "reference arclength of the rotation angle");
    flag("--grid", "grid", "grid NxM (n_s x n_phi)");
    flag("--harmonics", "harmonics", "plane-wave harmonics per side");
    flag("--kpath", "kpath", "k_s path start:end:count");
    flag("--transverse-n", "transverse_n", "transverse quantum number along the path");
    flag("--eps-sweep", "eps_sweep", "comma-separated epsilon values");
    flag("--out", "out", "output directory");
    flag("--units", "units", "natural | physical:<mu in kg>");
    flag("--s-period", "s_period", "cell length along s (needed for tau = 0)");
    flag("--corrupt-vkin", "corrupt_vkin", "test hook: offset added to V_kin in the identity check");

    using Command = std::function<int(const RunConfig&)>;
    std::vector<std::pair<CLI::App*, Command>> commands{
        {app.add_subcommand("geometry", "surface points and curvatures -> geometry.csv"), cmd_geometry},
        {app.add_subcommand("potential", "V_curv, V_kin, V_eff over the cell -> potential.csv"), cmd_potential},
        {app.add_subcommand("bands", "band structure along the k-path -> bands.csv, summary.json"), cmd_bands},
        {app.add_subcommand("gap-scan", "zone-boundary gap over an epsilon sweep -> gapscan.csv"), cmd_gap_scan},
        {app.add_subcommand("cylinder-check", "straight-tube oracle against the closed form"), cmd_cylinder_check},
        {app.add_subcommand("verify", "invariant suite -> verify.json"), cmd_verify},
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return BadConfig;
    }

    try {
        Entries entries;
        if (!config_path.empty()) entries = read_config_file(config_path);
        for (const auto& [k, v] : flags) entries[k] = v;
        const RunConfig config = make_config(entries);
        for (const auto& [sub, command] : commands) {
            if (sub->parsed()) return command(config);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return BadConfig;
    } catch (const InvalidSpec& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return BadConfig;
    } catch (const EmbeddingViolation& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return BadConfig;
    } catch (const DegeneratePeriod& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return BadConfig;
    } catch (const DegenerateCurve& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return BadConfig;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return BadConfig;
    } catch (const Error& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return SolverFailed;
    }
    return BadConfig;
}

}  // namespace helitube::cli

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hmarea/cli.hpp"

namespace {

void add_common(CLI::App* cmd, hmarea::cli::RunConfig& cfg, std::string& format) {
    cmd->add_option("--tol", cfg.quad.tol, "Quadrature tolerance")->capture_default_str();
    cmd->add_option("--q0", cfg.quad.q0, "Initial radial Gauss-Legendre nodes")->capture_default_str();
    cmd->add_option("--m0", cfg.quad.m0, "Initial angular nodes")->capture_default_str();
    cmd->add_option("--q-cap", cfg.quad.q_cap, "Radial node cap")->capture_default_str();
    cmd->add_option("--m-cap", cfg.quad.m_cap, "Angular node cap")->capture_default_str();
    cmd->add_option("--workers", cfg.quad.workers, "Worker threads")->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    cmd->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--format", format, "json | csv | both")->capture_default_str();
}

void add_map(CLI::App* cmd, hmarea::cli::RunConfig& cfg) {
    cmd->add_option("--map", cfg.map_path, "Map definition file (JSON)");
    cmd->add_option("--preset", cfg.preset, "Built-in map name");
}

void add_region(CLI::App* cmd, hmarea::cli::RunConfig& cfg) {
    cmd->add_option("--region", cfg.region_path, "Region file (JSON)");
    cmd->add_option("--r", cfg.r, "Disk radius used when no region file is given")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace hmarea::cli;
    RunConfig cfg;
    std::string format = "both";
    bool list_presets = false;

    CLI::App app{"Area distortion of planar harmonic maps of the unit disk"};
    app.add_flag("--list-presets", list_presets, "Print the built-in map names and exit");
    app.require_subcommand(0, 1);

    auto* area = app.add_subcommand("area", "Image area m(f(E)) via the Jacobian integral");
    add_common(area, cfg, format);
    add_map(area, cfg);
    add_region(area, cfg);

    auto* verify = app.add_subcommand("verify", "Run the inequality suite for r = 0.1 .. 0.9");
    add_common(verify, cfg, format);
    add_map(verify, cfg);

    auto* sweep = app.add_subcommand("sweep", "Area ratio over a parameter lattice of a family");
    add_common(sweep, cfg, format);
    add_region(sweep, cfg);
    sweep->add_option("--family", cfg.family_path, "Family file (JSON)")->required();
    sweep->add_option("--grid", cfg.grid, "Lattice points per axis")->capture_default_str();

    auto* search = app.add_subcommand("search", "Lattice-seeded simplex maximization");
    add_common(search, cfg, format);
    add_map(search, cfg);
    add_region(search, cfg);
    search->add_option("--family", cfg.family_path, "Family file (JSON)");
    search->add_option("--objective", cfg.objective, "area | sp")->capture_default_str();
    search->add_option("--iterations", cfg.iterations, "Simplex iterations")->capture_default_str();

    auto* oracle = app.add_subcommand("oracle", "Cross-check the Jacobian integral against a rasterized image");
    add_common(oracle, cfg, format);
    add_map(oracle, cfg);
    add_region(oracle, cfg);
    oracle->add_option("--n", cfg.raster_n, "Raster resolution (power of two)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kParseError;
    }

    if (list_presets) {
        for (const auto& p : hmarea::io::builtin_presets()) std::cout << p.name << "  " << p.description << '\n';
        return 0;
    }
    try {
        cfg.format = parse_format(format);
    } catch (const hmarea::ParseError& e) {
        std::cerr << e.what() << '\n';
        return kParseError;
    }

    if (area->parsed()) return cmd_area(cfg, std::cout, std::cerr);
    if (verify->parsed()) return cmd_verify(cfg, std::cout, std::cerr);
    if (sweep->parsed()) return cmd_sweep(cfg, std::cout, std::cerr);
    if (search->parsed()) return cmd_search(cfg, std::cout, std::cerr);
    if (oracle->parsed()) return cmd_oracle(cfg, std::cout, std::cerr);
    std::cout << app.help();
    return 0;
}

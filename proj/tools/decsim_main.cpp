#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "decsim/cli.hpp"

namespace {

using decsim::cli::kExitUsage;

bool load_config(const std::string& path, decsim::cli::RunConfig& cfg, std::ostream& diag) {
    if (path.empty()) return true;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        diag << "error: cannot open config '" << path << "'\n";
        return false;
    }
    std::ostringstream text;
    text << in.rdbuf();
    try {
        cfg = decsim::cli::parse_config(text.str());
    } catch (const decsim::cli::ConfigError& e) {
        diag << "error: " << path << ": " << e.what() << "\n";
        return false;
    }
    return true;
}

bool parse_amp_range(const std::string& spec, decsim::cli::AmpRange& amps) {
    unsigned long n = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lu", &amps.lo, &amps.hi, &n) != 3) return false;
    amps.n = n;
    return n >= 2;
}

bool parse_grid_range(const std::string& spec, decsim::cli::GridRange& grid) {
    unsigned long np = 0, nd = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lu,%lf:%lf:%lu", &grid.Kp_lo, &grid.Kp_hi, &np,
                    &grid.Kd_lo, &grid.Kd_hi, &nd) != 6)
        return false;
    grid.n_Kp = np;
    grid.n_Kd = nd;
    return np >= 2 && nd >= 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and stability analysis of a bio-inspired balance-control loop"};
    app.require_subcommand(1);

    std::string config_path, out_path, condition, amps_spec, grid_spec, columns, csv_path;
    double t_end = 0.0, step = 0.0;
    bool has_t_end = false, has_step = false;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file (key = value lines)");
        sub->add_option("--out", out_path, "output path");
    };

    auto* sim_cmd = app.add_subcommand("simulate", "run an experiment and write the trajectory CSV");
    add_common(sim_cmd);
    sim_cmd->add_option("--condition", condition, "experiment: 1, 2, 3 or custom");
    sim_cmd->add_option("--t-end", t_end, "duration [s]")->each([&](const std::string&) { has_t_end = true; });
    sim_cmd->add_option("--step", step, "integration step [s]")->each([&](const std::string&) { has_step = true; });

    auto* check_cmd = app.add_subcommand("check", "print the stability report");
    add_common(check_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "gain-vs-amplitude sweep CSV");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--amps", amps_spec, "LO:HI:N, N log-spaced amplitudes [rad/s]");
    sweep_cmd->add_option("--t-end", t_end, "duration per run [s]")->each([&](const std::string&) { has_t_end = true; });
    sweep_cmd->add_option("--step", step, "integration step [s]")->each([&](const std::string&) { has_step = true; });

    auto* region_cmd = app.add_subcommand("region", "stability verdicts over a PD-gain grid");
    add_common(region_cmd);
    region_cmd->add_option("--grid", grid_spec, "KP_LO:KP_HI:N,KD_LO:KD_HI:N");

    auto* plot_cmd = app.add_subcommand("plot", "render CSV columns as an SVG line chart");
    plot_cmd->add_option("csv", csv_path, "input CSV path")->required();
    plot_cmd->add_option("--columns", columns, "comma-separated column names (default: all)");
    plot_cmd->add_option("--out", out_path, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    decsim::cli::RunConfig cfg;
    if (!load_config(config_path, cfg, std::cerr)) return kExitUsage;
    if (has_t_end) cfg.t_end = t_end;
    if (has_step) cfg.step = step;
    if (!condition.empty()) cfg.condition = condition;
    if (!out_path.empty()) cfg.out = out_path;

    try {
        if (sim_cmd->parsed()) {
            const std::string out = cfg.out.empty() ? "trajectory.csv" : cfg.out;
            return decsim::cli::cmd_simulate(cfg, cfg.condition, out, std::cerr);
        }
        if (check_cmd->parsed()) {
            return decsim::cli::cmd_check(cfg, cfg.out, std::cout, std::cerr);
        }
        if (sweep_cmd->parsed()) {
            decsim::cli::AmpRange amps;
            if (!amps_spec.empty() && !parse_amp_range(amps_spec, amps)) {
                std::cerr << "error: --amps expects LO:HI:N with N >= 2\n";
                return kExitUsage;
            }
            const std::string out = cfg.out.empty() ? "sweep.csv" : cfg.out;
            return decsim::cli::cmd_sweep(cfg, amps, out, std::cerr);
        }
        if (region_cmd->parsed()) {
            decsim::cli::GridRange grid;
            if (!grid_spec.empty() && !parse_grid_range(grid_spec, grid)) {
                std::cerr << "error: --grid expects KP_LO:KP_HI:N,KD_LO:KD_HI:N with N >= 2\n";
                return kExitUsage;
            }
            const std::string out = cfg.out.empty() ? "region.csv" : cfg.out;
            return decsim::cli::cmd_region(cfg, grid, out, std::cout, std::cerr);
        }
        // plot
        const std::string out = out_path.empty() ? "plot.svg" : out_path;
        return decsim::cli::cmd_plot(csv_path, columns, out, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

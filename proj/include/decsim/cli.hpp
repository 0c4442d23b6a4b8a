#pragma once

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "decsim/analysis.hpp"
#include "decsim/config.hpp"
#include "decsim/csv.hpp"
#include "decsim/simulate.hpp"
#include "decsim/stability.hpp"
#include "decsim/svg.hpp"

// Command layer behind the executable. Every command is deterministic (same
// configuration, same bytes) and returns the process exit code:
//   0  success
//   1  negative analysis result (unstable, divergence) or unwritable output
//   2  usage or configuration error

namespace decsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAnalysis = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline bool write_file(const std::string& path, const std::string& contents,
                       std::ostream& diag) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        diag << "error: cannot open '" << path << "' for writing\n";
        return false;
    }
    out << contents;
    out.flush();
    if (!out) {
        diag << "error: failed while writing '" << path << "'\n";
        return false;
    }
    return true;
}

inline double condition_default_duration(const std::string& condition) {
    if (condition == "2") return sim::kCondition2Duration;
    return 20.0;
}

}  // namespace detail

// Runs one experiment and writes the sampled trajectory as CSV.
inline int cmd_simulate(const RunConfig& cfg, const std::string& condition,
                        const std::string& out_path, std::ostream& diag) {
    if (condition != "1" && condition != "2" && condition != "3" && condition != "custom") {
        diag << "error: condition must be 1, 2, 3 or custom\n";
        return kExitUsage;
    }
    const double t_end = cfg.t_end.value_or(detail::condition_default_duration(condition));
    const double h = cfg.step;

    Trajectory traj;
    try {
        if (condition == "1") traj = sim::condition1(cfg.plant, cfg.ctrl, t_end, h);
        else if (condition == "2") traj = sim::condition2(cfg.plant, cfg.ctrl, t_end, h);
        else if (condition == "3") traj = sim::condition3(cfg.plant, cfg.ctrl, t_end, h);
        else
            traj = sim::rk4_integrate(sim::DerivativePath::Blocks, cfg.plant, cfg.ctrl,
                                      State{}, cfg.input, t_end, h);
    } catch (const sim::DivergenceError& e) {
        diag << "error: " << e.what() << "\n";
        return kExitAnalysis;
    }

    const auto trace = sim::derive_signals(cfg.plant, cfg.ctrl, traj);
    std::ostringstream body;
    write_trajectory_csv(body, traj, trace);
    return detail::write_file(out_path, body.str(), diag) ? kExitOk : kExitAnalysis;
}

// Prints the gain inequalities with both sides evaluated, the Routh verdict,
// the eigenvalues and the classification; optionally writes the same report
// as JSON. Exits 0 when the loop is at least Lyapunov stable.
inline int cmd_check(const RunConfig& cfg, const std::string& json_out_path,
                     std::ostream& out, std::ostream& diag) {
    const auto rep = stability::analyze(cfg.plant, cfg.ctrl);

    const auto line = [&out](const char* name, const stability::Inequality& q) {
        out << "  " << name << ": " << format_number(q.lhs) << " < " << format_number(q.rhs)
            << "  ->  " << (q.holds() ? "holds" : "violated") << "\n";
    };
    out << "Gain inequalities:\n";
    line("Kd_a < c_L*J_B - Kd_p              ", rep.lemma1.derivative_gain);
    line("Kp_a + Kd_a*c_L < K_G - m*g*h_B - Kp_p - c_L*Kd_p", rep.lemma1.combined_gain);
    line("Kp_a < K_G - m*g*h_B - Kp_p        ", rep.lemma1.proportional_gain);
    out << "Characteristic cubic [c2, c1, c0]: " << format_number(rep.cubic[0]) << ", "
        << format_number(rep.cubic[1]) << ", " << format_number(rep.cubic[2]) << "\n";
    out << "Routh-Hurwitz: " << (rep.routh_ok ? "holds" : "violated") << "\n";
    out << "Eigenvalues:\n";
    for (const auto& z : rep.eigenvalues)
        out << "  " << format_number(z.real()) << (z.imag() < 0 ? " - " : " + ")
            << format_number(std::abs(z.imag())) << "i\n";
    out << "Classification: " << stability::to_string(rep.classification) << "\n";
    if (rep.degenerate_zero)
        out << "Note: repeated zero eigenvalue; verdict used a rank test\n";

    if (!json_out_path.empty()) {
        nlohmann::json j;
        j["lemma1"] = nlohmann::json::array();
        for (const auto& q : {rep.lemma1.derivative_gain, rep.lemma1.combined_gain,
                              rep.lemma1.proportional_gain})
            j["lemma1"].push_back({{"lhs", q.lhs}, {"rhs", q.rhs}, {"holds", q.holds()}});
        j["routh_ok"] = rep.routh_ok;
        j["cubic"] = {rep.cubic[0], rep.cubic[1], rep.cubic[2]};
        j["eigenvalues"] = nlohmann::json::array();
        for (const auto& z : rep.eigenvalues)
            j["eigenvalues"].push_back({{"re", z.real()}, {"im", z.imag()}});
        j["classification"] = stability::to_string(rep.classification);
        j["degenerate_zero"] = rep.degenerate_zero;
        if (!detail::write_file(json_out_path, j.dump(2) + "\n", diag)) return kExitAnalysis;
    }

    const bool stable = rep.classification != stability::Classification::Unstable;
    return stable ? kExitOk : kExitAnalysis;
}

struct AmpRange {
    double lo = 1e-4;
    double hi = 1.0;
    std::size_t n = 25;
};

// Gain-vs-amplitude sweep over logarithmically spaced input amplitudes.
inline int cmd_sweep(const RunConfig& cfg, const AmpRange& amps,
                     const std::string& out_path, std::ostream& diag) {
    std::vector<double> amplitudes;
    try {
        amplitudes = analysis::log_spaced(amps.lo, amps.hi, amps.n);
    } catch (const std::invalid_argument& e) {
        diag << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    const double omega = std::holds_alternative<sim::Sinusoid>(cfg.input)
                             ? std::get<sim::Sinusoid>(cfg.input).omega
                             : 10.0;
    analysis::SweepOptions opt;
    opt.flag_undefined = true;
    if (cfg.t_end) opt.t_end = *cfg.t_end;
    opt.h = cfg.step;

    analysis::GainCurve curve;
    try {
        curve = analysis::sweep_gain(cfg.plant, cfg.ctrl, amplitudes, omega, opt);
    } catch (const sim::DivergenceError& e) {
        diag << "error: " << e.what() << "\n";
        return kExitAnalysis;
    }

    std::ostringstream body;
    body << "amplitude,gain,regime\n";
    for (std::size_t i = 0; i < curve.amplitudes.size(); ++i)
        body << format_number(curve.amplitudes[i]) << ',' << format_number(curve.gains[i])
             << ',' << analysis::regime_name(curve.regimes[i]) << '\n';
    return detail::write_file(out_path, body.str(), diag) ? kExitOk : kExitAnalysis;
}

struct GridRange {
    double Kp_lo = -3000.0;
    double Kp_hi = 500.0;
    std::size_t n_Kp = 50;
    double Kd_lo = -3000.0;
    double Kd_hi = 500.0;
    std::size_t n_Kd = 50;
};

// Stability verdicts over a PD-gain grid.
inline int cmd_region(const RunConfig& cfg, const GridRange& grid,
                      const std::string& out_path, std::ostream& out, std::ostream& diag) {
    analysis::RegionMap map;
    try {
        map = analysis::stability_region(cfg.plant, cfg.ctrl, {grid.Kp_lo, grid.Kp_hi},
                                         {grid.Kd_lo, grid.Kd_hi}, grid.n_Kp, grid.n_Kd);
    } catch (const std::invalid_argument& e) {
        diag << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    std::ostringstream body;
    body << "Kp_a,Kd_a,lemma1,routh,numeric\n";
    for (const auto& pt : map.points)
        body << format_number(pt.Kp_a) << ',' << format_number(pt.Kd_a) << ','
             << (pt.lemma1 ? "true" : "false") << ',' << (pt.routh ? "true" : "false")
             << ',' << (pt.numeric ? "true" : "false") << '\n';
    if (!detail::write_file(out_path, body.str(), diag)) return kExitAnalysis;

    out << "grid points: " << map.points.size() << "\n";
    out << "inequality-gate vs Routh disagreements: " << map.lemma1_routh_disagreements
        << "\n";
    out << "Routh vs numeric mismatches off boundary: " << map.routh_numeric_mismatches
        << "\n";
    return kExitOk;
}

// Renders selected CSV columns against the first column as an SVG chart.
inline int cmd_plot(const std::string& csv_path, const std::string& columns,
                    const std::string& out_path, std::ostream& diag) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) {
        diag << "error: cannot open '" << csv_path << "'\n";
        return kExitUsage;
    }
    CsvTable table;
    try {
        table = read_csv(in);
    } catch (const CsvError& e) {
        diag << "error: malformed CSV: " << e.what() << "\n";
        return kExitUsage;
    }
    if (table.rows.empty()) {
        diag << "error: CSV has no data rows\n";
        return kExitUsage;
    }
    if (table.header.size() < 2) {
        diag << "error: CSV needs at least two columns\n";
        return kExitUsage;
    }

    std::vector<std::size_t> selected;
    if (columns.empty()) {
        for (std::size_t i = 1; i < table.header.size(); ++i) selected.push_back(i);
    } else {
        std::size_t pos = 0;
        while (pos <= columns.size()) {
            const auto comma = columns.find(',', pos);
            const std::string name = columns.substr(
                pos, comma == std::string::npos ? std::string::npos : comma - pos);
            bool found = false;
            for (std::size_t i = 0; i < table.header.size(); ++i)
                if (table.header[i] == name) {
                    selected.push_back(i);
                    found = true;
                    break;
                }
            if (!found) {
                diag << "error: unknown column '" << name << "'\n";
                return kExitUsage;
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }

    std::vector<double> x;
    std::vector<SvgSeries> series;
    try {
        x = numeric_column(table, 0);
        series.reserve(selected.size());
        for (const std::size_t col : selected)
            series.push_back({table.header[col], numeric_column(table, col)});
    } catch (const CsvError& e) {
        diag << "error: malformed CSV: " << e.what() << "\n";
        return kExitUsage;
    }

    const std::string svg = render_line_chart(table.header[0], x, series);
    return detail::write_file(out_path, svg, diag) ? kExitOk : kExitAnalysis;
}

}  // namespace decsim::cli

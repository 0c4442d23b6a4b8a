#pragma once

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "decsim/config.hpp"
#include "decsim/simulate.hpp"
#include "decsim/trajectory.hpp"

namespace decsim::cli {

class CsvError : public std::runtime_error {
public:
    CsvError(int line_number, const std::string& message)
        : std::runtime_error("line " + std::to_string(line_number) + ": " + message),
          line(line_number) {}
    int line;
};

// Cells stay text; columns are parsed on demand so mixed numeric/label
// tables (for example the sweep output) read fine.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t pos = 0;
        while (true) {
            const auto comma = line.find(',', pos);
            cells.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                        : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (line_number == 1) {
            table.header = cells;
            continue;
        }
        if (cells.size() != table.header.size())
            throw CsvError(line_number, "expected " + std::to_string(table.header.size()) +
                                            " columns, got " + std::to_string(cells.size()));
        table.rows.push_back(std::move(cells));
    }
    if (table.header.empty()) throw CsvError(1, "missing header");
    return table;
}

inline std::vector<double> numeric_column(const CsvTable& table, std::size_t col) {
    std::vector<double> out;
    out.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto v = detail::parse_double(detail::trim(table.rows[i][col]));
        if (!v)
            throw CsvError(static_cast<int>(i) + 2, "cannot parse number '" +
                                                        table.rows[i][col] + "' in column '" +
                                                        table.header[col] + "'");
        out.push_back(*v);
    }
    return out;
}

// One row per integration sample, full double precision, LF line endings.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                                 const sim::SignalTrace& trace) {
    out << "t,x1,x2,x3,x4,u,alpha_BF,alpha_FS_hat,epsilon,T_a,T_p,T_G\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out << format_number(traj.t[i]) << ',' << format_number(traj.x[i].x1) << ','
            << format_number(traj.x[i].x2) << ',' << format_number(traj.x[i].x3) << ','
            << format_number(traj.x[i].x4) << ',' << format_number(traj.u[i]) << ','
            << format_number(trace.alpha_BF[i]) << ',' << format_number(trace.alpha_FS_hat[i])
            << ',' << format_number(trace.epsilon[i]) << ',' << format_number(trace.T_a[i])
            << ',' << format_number(trace.T_p[i]) << ',' << format_number(trace.T_G[i])
            << '\n';
    }
}

}  // namespace decsim::cli

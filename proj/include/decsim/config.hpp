#pragma once

#include <charconv>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "decsim/model.hpp"
#include "decsim/simulate.hpp"

// Flat `key = value` run configuration. Every key has a documented default;
// unknown keys are rejected with their line number. Defaults reproduce the
// standard parameter set and designed PD gains.

namespace decsim::cli {

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line_number, const std::string& message)
        : std::runtime_error(line_number > 0
                                 ? "line " + std::to_string(line_number) + ": " + message
                                 : message),
          line(line_number) {}
    int line;
};

struct RunConfig {
    PlantParams plant;
    ControlParams ctrl;
    // integration duration [s]; unset means "per experiment default"
    std::optional<double> t_end;
    double step = sim::kDefaultStep;  // integration step [s]
    // input signal for the custom experiment (presets fix their own input)
    sim::InputSignal input = sim::Zero{};
    std::string condition = "1";  // experiment selector: 1 | 2 | 3 | custom
    std::string out;              // output path; empty selects a per-command default
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_double(std::string_view token) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return value;
}

// Input-signal fields are collected key by key and assembled afterwards.
struct SignalFields {
    std::string kind = "zero";
    double u0 = 0.0;
    double amplitude = 0.1;
    double omega = 10.0;
    double phase = 0.0;
};

}  // namespace detail

inline RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    detail::SignalFields sig;

    int line_number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_number;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(line_number, "expected `key = value`");
        const std::string key{detail::trim(line.substr(0, eq))};
        const std::string value{detail::trim(line.substr(eq + 1))};
        if (key.empty()) throw ConfigError(line_number, "missing key");
        if (value.empty()) throw ConfigError(line_number, "missing value for key '" + key + "'");

        const auto number = [&]() {
            const auto v = detail::parse_double(value);
            if (!v) throw ConfigError(line_number, "cannot parse number '" + value + "'");
            return *v;
        };

        if (key == "J_B") cfg.plant.J_B = number();
        else if (key == "m") cfg.plant.m = number();
        else if (key == "g") cfg.plant.g = number();
        else if (key == "h_B") cfg.plant.h_B = number();
        else if (key == "Kp_p") cfg.plant.Kp_p = number();
        else if (key == "Kd_p") cfg.plant.Kd_p = number();
        else if (key == "Kp_a") cfg.ctrl.Kp_a = number();
        else if (key == "Kd_a") cfg.ctrl.Kd_a = number();
        else if (key == "Kg") cfg.ctrl.Kg = number();
        else if (key == "c_L") cfg.ctrl.c_L = number();
        else if (key == "theta") cfg.ctrl.theta = number();
        else if (key == "alpha_ref") cfg.ctrl.alpha_ref = number();
        else if (key == "t_end") cfg.t_end = number();
        else if (key == "step") cfg.step = number();
        else if (key == "input") {
            if (value != "zero" && value != "constant" && value != "sinusoid")
                throw ConfigError(line_number,
                                  "input must be zero, constant or sinusoid (got '" + value + "')");
            sig.kind = value;
        } else if (key == "u0") sig.u0 = number();
        else if (key == "amplitude") sig.amplitude = number();
        else if (key == "omega") sig.omega = number();
        else if (key == "phase") sig.phase = number();
        else if (key == "condition") {
            if (value != "1" && value != "2" && value != "3" && value != "custom")
                throw ConfigError(line_number,
                                  "condition must be 1, 2, 3 or custom (got '" + value + "')");
            cfg.condition = value;
        } else if (key == "out") cfg.out = value;
        else throw ConfigError(line_number, "unknown key '" + key + "'");
    }

    if (sig.kind == "zero") cfg.input = sim::Zero{};
    else if (sig.kind == "constant") cfg.input = sim::Constant{sig.u0};
    else cfg.input = sim::Sinusoid{sig.amplitude, sig.omega, sig.phase};

    const auto violations = validate(cfg.plant, cfg.ctrl);
    if (!violations.empty()) {
        std::string msg = "invalid parameters:";
        for (const auto& v : violations) msg += " " + v + ";";
        throw ConfigError(0, msg);
    }
    if (!(cfg.step > 0.0)) throw ConfigError(0, "step must be > 0");
    if (cfg.t_end && !(*cfg.t_end > 0.0)) throw ConfigError(0, "t_end must be > 0");
    try {
        sim::validate_signal(cfg.input);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, e.what());
    }
    return cfg;
}

// 17 significant digits round-trip doubles exactly.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Emits every key at full precision; parsing the result reproduces the
// configuration bit for bit.
inline std::string format_config(const RunConfig& cfg) {
    std::ostringstream os;
    const auto put = [&os](const char* key, double v) {
        os << key << " = " << format_number(v) << "\n";
    };
    put("J_B", cfg.plant.J_B);
    put("m", cfg.plant.m);
    put("g", cfg.plant.g);
    put("h_B", cfg.plant.h_B);
    put("Kp_p", cfg.plant.Kp_p);
    put("Kd_p", cfg.plant.Kd_p);
    put("Kp_a", cfg.ctrl.Kp_a);
    put("Kd_a", cfg.ctrl.Kd_a);
    put("Kg", cfg.ctrl.Kg);
    put("c_L", cfg.ctrl.c_L);
    put("theta", cfg.ctrl.theta);
    put("alpha_ref", cfg.ctrl.alpha_ref);
    if (cfg.t_end) put("t_end", *cfg.t_end);
    put("step", cfg.step);
    if (std::holds_alternative<sim::Zero>(cfg.input)) {
        os << "input = zero\n";
    } else if (const auto* c = std::get_if<sim::Constant>(&cfg.input)) {
        os << "input = constant\n";
        put("u0", c->u0);
    } else {
        const auto& s = std::get<sim::Sinusoid>(cfg.input);
        os << "input = sinusoid\n";
        put("amplitude", s.amplitude);
        put("omega", s.omega);
        put("phase", s.phase);
    }
    os << "condition = " << cfg.condition << "\n";
    if (!cfg.out.empty()) os << "out = " << cfg.out << "\n";
    return os.str();
}

}  // namespace decsim::cli

#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace decsim {

// Physical constants of the single-inverted-pendulum plant (body pivoting
// about the ankle on a tilting platform).
struct PlantParams {
    double J_B = 71.55;    // moment of inertia about the ankle [kg m^2]
    double m = 80.0;       // body mass [kg]
    double g = 9.81;       // gravitational acceleration [m/s^2]
    double h_B = 0.9;      // center-of-mass height above the ankle [m]
    double Kp_p = 157.31;  // passive ankle stiffness [N m/rad]
    double Kd_p = 39.32;   // passive ankle damping [N m s/rad]

    // Gravitational toppling stiffness m*g*h_B [N m/rad].
    double toppling_stiffness() const { return m * g * h_B; }
};

// Controller constants: PD servo on the body-sway estimate, fractional
// gravity compensation, and the sensor-fusion path (leaky integrator with a
// dead-band on the tilt-rate estimate).
struct ControlParams {
    double Kp_a = -1200.0;   // servo proportional gain [N m/rad]
    double Kd_a = -1000.0;   // servo derivative gain [N m s/rad]
    double Kg = 0.8;         // gravity-compensation fraction, 0 < Kg <= 1
    double c_L = 0.0125;     // leaky-integrator leak rate [1/s]
    double theta = 0.0028;   // dead-band half-width on the tilt rate [rad/s]
    double alpha_ref = 0.0;  // servo set-point [rad]; the closed-loop form assumes 0
};

// Closed-loop state.
struct State {
    double x1 = 0.0;  // body sway alpha_BS [rad]
    double x2 = 0.0;  // body sway velocity [rad/s]
    double x3 = 0.0;  // body sway estimate [rad]
    double x4 = 0.0;  // platform tilt alpha_FS [rad]
};

inline State operator+(const State& a, const State& b) {
    return {a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3, a.x4 + b.x4};
}

inline State operator-(const State& a, const State& b) {
    return {a.x1 - b.x1, a.x2 - b.x2, a.x3 - b.x3, a.x4 - b.x4};
}

inline State operator*(double s, const State& a) {
    return {s * a.x1, s * a.x2, s * a.x3, s * a.x4};
}

inline bool is_finite(const State& s) {
    return std::isfinite(s.x1) && std::isfinite(s.x2) && std::isfinite(s.x3) &&
           std::isfinite(s.x4);
}

inline double max_abs(const State& s) {
    return std::max(std::max(std::abs(s.x1), std::abs(s.x2)),
                    std::max(std::abs(s.x3), std::abs(s.x4)));
}

// Effective gravity-compensation torque gain K_G = Kg * m * g * h_B [N m/rad].
// Kg = 1 compensates the toppling stiffness exactly; Kg < 1 under-compensates.
inline double gravity_gain(const PlantParams& p, const ControlParams& c) {
    return c.Kg * p.m * p.g * p.h_B;
}

namespace detail {

inline void check(std::vector<std::string>& out, bool ok, const char* field,
                  const char* bound, double got) {
    if (ok) return;
    std::ostringstream os;
    os << field << " must be " << bound << " (got " << got << ")";
    out.push_back(os.str());
}

}  // namespace detail

// Checks every parameter invariant. Returns one message per violation, each
// naming the offending field and its bound; empty means the set is valid.
inline std::vector<std::string> validate(const PlantParams& p, const ControlParams& c) {
    std::vector<std::string> v;
    detail::check(v, p.J_B > 0, "J_B", "> 0", p.J_B);
    detail::check(v, p.m > 0, "m", "> 0", p.m);
    detail::check(v, p.g > 0, "g", "> 0", p.g);
    detail::check(v, p.h_B > 0, "h_B", "> 0", p.h_B);
    detail::check(v, p.Kp_p >= 0, "Kp_p", ">= 0", p.Kp_p);
    detail::check(v, p.Kd_p >= 0, "Kd_p", ">= 0", p.Kd_p);
    detail::check(v, std::isfinite(c.Kp_a), "Kp_a", "finite", c.Kp_a);
    detail::check(v, std::isfinite(c.Kd_a), "Kd_a", "finite", c.Kd_a);
    detail::check(v, c.Kg > 0 && c.Kg <= 1, "Kg", "in (0, 1]", c.Kg);
    detail::check(v, c.c_L > 0, "c_L", "> 0", c.c_L);
    detail::check(v, c.theta >= 0, "theta", ">= 0", c.theta);
    detail::check(v, c.alpha_ref == 0, "alpha_ref", "0", c.alpha_ref);
    return v;
}

// Throws std::invalid_argument listing every violation.
inline void require_valid(const PlantParams& p, const ControlParams& c) {
    const auto violations = validate(p, c);
    if (violations.empty()) return;
    std::string msg = "invalid parameters:";
    for (const auto& s : violations) msg += "\n  " + s;
    throw std::invalid_argument(msg);
}

}  // namespace decsim

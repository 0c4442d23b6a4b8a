#pragma once

#include <Eigen/Dense>

#include "decsim/blocks.hpp"
#include "decsim/model.hpp"

// Closed-loop model in coefficient and matrix form. The nonlinearity enters
// only through the input u (the platform tilt rate):
//
//   x1' = x2
//   x2' = a1 x1 + a2 x2 + a3 x3 + a4 x4 + f(u)/J_B
//   x3' = b x1 + x2 - b x3 - b x4 + g(u)
//   x4' = u
//
// with g(u) = deadband(u) - u and f(u) = Kd_a g(u) - Kd_p u. f is a torque
// rate, so it is divided by J_B where it feeds the acceleration row.

namespace decsim::statespace {

struct Coefficients {
    double a1 = 0.0;  // [1/s^2]
    double a2 = 0.0;  // [1/s]
    double a3 = 0.0;  // [1/s^2]
    double a4 = 0.0;  // [1/s^2]
    double b = 0.0;   // leak rate alias c_L [1/s]
};

inline Coefficients build_coefficients(const PlantParams& p, const ControlParams& c) {
    const double K_G = gravity_gain(p, c);
    const double mgh = p.toppling_stiffness();
    Coefficients k;
    k.a1 = (p.Kp_p + c.Kd_a * c.c_L + mgh - K_G) / p.J_B;
    k.a2 = (c.Kd_a + p.Kd_p) / p.J_B;
    k.a3 = (c.Kp_a - c.c_L * c.Kd_a) / p.J_B;
    // Expanding the torque balance puts -(Kp_p + c_L Kd_a)/J_B on the x4
    // column; the block-diagram equivalence tests pin this sign.
    k.a4 = -(p.Kp_p + c.c_L * c.Kd_a) / p.J_B;
    k.b = c.c_L;
    return k;
}

// Input nonlinearities. g feeds the estimate row directly; f/J_B feeds the
// acceleration row.
struct InputTerms {
    double f;  // Kd_a g(u) - Kd_p u  [N m, before division by J_B]
    double g;  // deadband(u) - u     [rad/s]
};

inline InputTerms input_nonlinearities(const PlantParams& p, const ControlParams& c, double u) {
    const double g = blocks::deadband(c.theta, u) - u;
    return {c.Kd_a * g - p.Kd_p * u, g};
}

inline State closed_loop_derivative(const Coefficients& k, const PlantParams& p,
                                    const ControlParams& c, const State& s, double u) {
    const InputTerms in = input_nonlinearities(p, c, u);
    State d;
    d.x1 = s.x2;
    d.x2 = k.a1 * s.x1 + k.a2 * s.x2 + k.a3 * s.x3 + k.a4 * s.x4 + in.f / p.J_B;
    d.x3 = k.b * s.x1 + s.x2 - k.b * s.x3 - k.b * s.x4 + in.g;
    d.x4 = u;
    return d;
}

// Evaluates the input vector B(u) = [0, f(u)/J_B, g(u), u].
struct InputMap {
    double theta = 0.0;
    double Kd_a = 0.0;
    double Kd_p = 0.0;
    double J_B = 1.0;

    Eigen::Vector4d operator()(double u) const {
        const double g = blocks::deadband(theta, u) - u;
        const double f = Kd_a * g - Kd_p * u;
        return {0.0, f / J_B, g, u};
    }
};

// Matrix form x' = A x + B(u). Row 1 of A is [0,1,0,0], row 3 is
// [b,1,-b,-b], row 4 is zero (x4 integrates the input, so 0 is always an
// eigenvalue).
struct SystemMatrices {
    Eigen::Matrix4d A;
    InputMap input;
};

inline SystemMatrices build_matrices(const Coefficients& k, const InputMap& input) {
    SystemMatrices m;
    m.A << 0.0, 1.0, 0.0, 0.0,
           k.a1, k.a2, k.a3, k.a4,
           k.b, 1.0, -k.b, -k.b,
           0.0, 0.0, 0.0, 0.0;
    m.input = input;
    return m;
}

inline SystemMatrices build_matrices(const PlantParams& p, const ControlParams& c) {
    return build_matrices(build_coefficients(p, c),
                          InputMap{c.theta, c.Kd_a, p.Kd_p, p.J_B});
}

inline Eigen::Vector4d to_vector(const State& s) { return {s.x1, s.x2, s.x3, s.x4}; }

inline State to_state(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

}  // namespace decsim::statespace

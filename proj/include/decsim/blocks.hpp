#pragma once

#include "decsim/model.hpp"

// Individual blocks of the control diagram: torques, the dead-band, the leaky
// integrator, the sensor-fusion estimates and the PD servo, plus the full
// block-diagram state derivative assembled from them. Direct measurements are
// taken equal to the true state (perfect sensing); all functions are pure.

namespace decsim::blocks {

// Passive ankle torque Kp_p*alpha_BF + Kd_p*d/dt(alpha_BF) [N m].
inline double passive_torque(const PlantParams& p, double alpha_BF, double alpha_BF_dot) {
    return p.Kp_p * alpha_BF + p.Kd_p * alpha_BF_dot;
}

// Gravitational toppling torque, small-angle form m*g*h_B*alpha_BS [N m].
inline double gravity_torque(const PlantParams& p, double alpha_BS) {
    return p.m * p.g * p.h_B * alpha_BS;
}

// Gravity-compensation torque K_G * measured sway [N m]. The measured sway is
// used directly; the dead-band acts only on the tilt-rate path.
inline double gravity_compensation(double K_G, double alpha_BS_meas) {
    return K_G * alpha_BS_meas;
}

// Dead-band: zero on [-theta, theta], shifts the input by -+theta outside.
// Odd, continuous, 1-Lipschitz.
inline double deadband(double theta, double v) {
    if (v <= -theta) return v + theta;
    if (v >= theta) return v - theta;
    return 0.0;
}

// Tilt-rate estimate from vestibular and proprioceptive rates [rad/s].
inline double fs_rate_estimate(double alpha_BS_dot_meas, double alpha_BF_dot_meas) {
    return alpha_BS_dot_meas - alpha_BF_dot_meas;
}

// Time derivative of the leaky-integrator tilt estimate [rad/s]; the caller
// integrates it.
inline double leaky_integrator_rate(double c_L, double fs_est, double fs_rate_after_deadband) {
    return fs_rate_after_deadband - c_L * fs_est;
}

// Body-sway estimate: tilt estimate plus measured ankle angle [rad].
inline double body_sway_estimate(double fs_est, double alpha_BF_meas) {
    return fs_est + alpha_BF_meas;
}

// PD servo torque Kp_a*epsilon + Kd_a*d/dt(epsilon) [N m].
inline double servo_torque(const ControlParams& c, double epsilon, double epsilon_dot) {
    return c.Kp_a * epsilon + c.Kd_a * epsilon_dot;
}

// Signals flowing through the estimation/servo path at one instant. The servo
// derivative term uses the analytic rate of the estimate, not a numerical
// differentiator.
struct LoopSignals {
    double alpha_BF;      // ankle angle x1 - x4 [rad]
    double alpha_BF_dot;  // ankle rate x2 - u [rad/s]
    double alpha_FS_hat;  // leaky-integrator tilt estimate x3 - alpha_BF [rad]
    double fs_rate_est;   // tilt-rate estimate fed to the dead-band [rad/s]
    double x3_dot;        // rate of the body-sway estimate [rad/s]
    double epsilon;       // servo error x3 - alpha_ref [rad]
};

inline LoopSignals loop_signals(const ControlParams& c, const State& s, double u) {
    LoopSignals L;
    L.alpha_BF = s.x1 - s.x4;
    L.alpha_BF_dot = s.x2 - u;
    L.alpha_FS_hat = s.x3 - L.alpha_BF;
    L.fs_rate_est = fs_rate_estimate(s.x2, L.alpha_BF_dot);
    const double est_rate =
        leaky_integrator_rate(c.c_L, L.alpha_FS_hat, deadband(c.theta, L.fs_rate_est));
    L.x3_dot = est_rate + L.alpha_BF_dot;
    L.epsilon = s.x3 - c.alpha_ref;
    return L;
}

// Torque balance at one instant. Invariant: T_a = -T_a_G + T_a_a.
struct TorqueBreakdown {
    double T_p;    // passive stiffness/damping torque [N m]
    double T_G;    // gravitational torque [N m]
    double T_a_G;  // gravity-compensation component of the active torque [N m]
    double T_a_a;  // servo component of the active torque [N m]
    double T_a;    // total active ankle torque [N m]
};

inline TorqueBreakdown torques(const PlantParams& p, const ControlParams& c,
                               const LoopSignals& L, const State& s) {
    TorqueBreakdown T;
    T.T_p = passive_torque(p, L.alpha_BF, L.alpha_BF_dot);
    T.T_G = gravity_torque(p, s.x1);
    T.T_a_G = gravity_compensation(gravity_gain(p, c), s.x1);
    T.T_a_a = servo_torque(c, L.epsilon, L.x3_dot);
    T.T_a = -T.T_a_G + T.T_a_a;
    return T;
}

inline TorqueBreakdown torques(const PlantParams& p, const ControlParams& c,
                               const State& s, double u) {
    return torques(p, c, loop_signals(c, s, u), s);
}

// State derivative assembled block by block from the diagram. Serves as the
// independent reference for the closed-loop state-space form.
inline State block_derivative(const PlantParams& p, const ControlParams& c,
                              const State& s, double u) {
    const LoopSignals L = loop_signals(c, s, u);
    const TorqueBreakdown T = torques(p, c, L, s);
    State d;
    d.x1 = s.x2;
    d.x2 = (T.T_a + T.T_p + T.T_G) / p.J_B;
    d.x3 = L.x3_dot;
    d.x4 = u;
    return d;
}

}  // namespace decsim::blocks

#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "decsim/blocks.hpp"
#include "decsim/statespace.hpp"
#include "decsim/trajectory.hpp"

// Time-domain simulation: input-signal generators, a fixed-step classical
// Runge-Kutta integrator over either derivative path, and the three standard
// experiment presets. Runs are deterministic; identical inputs produce
// bitwise-identical trajectories.

namespace decsim::sim {

struct Zero {};

struct Constant {
    double u0 = 0.0;  // [rad/s]
};

struct Sinusoid {
    double amplitude = 0.0;  // [rad/s], >= 0
    double omega = 1.0;      // [rad/s], > 0
    double phase = 0.0;      // [rad]
};

using InputSignal = std::variant<Zero, Constant, Sinusoid>;

inline void validate_signal(const InputSignal& sig) {
    if (const auto* s = std::get_if<Sinusoid>(&sig)) {
        if (!(s->amplitude >= 0.0))
            throw std::invalid_argument("Sinusoid amplitude must be >= 0");
        if (!(s->omega > 0.0)) throw std::invalid_argument("Sinusoid omega must be > 0");
    }
}

inline double evaluate(const InputSignal& sig, double t) {
    if (std::holds_alternative<Zero>(sig)) return 0.0;
    if (const auto* c = std::get_if<Constant>(&sig)) return c->u0;
    const auto& s = std::get<Sinusoid>(sig);
    return s.amplitude * std::cos(s.omega * t + s.phase);
}

// Thrown when a state sample leaves the finite-magnitude guard; carries the
// time of the offending step so instability can be told apart from overflow.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(double t)
        : std::runtime_error("state diverged at t = " + std::to_string(t) + " s"),
          time(t) {}
    double time;
};

// Magnitude guard for the divergence check.
inline constexpr double kDivergenceBound = 1e6;

enum class DerivativePath { Blocks, StateSpace };

namespace detail {

template <class Deriv>
State rk4_step(Deriv&& f, const State& x, double u0, double u_half, double u_end, double h) {
    const State k1 = f(x, u0);
    const State k2 = f(x + (0.5 * h) * k1, u_half);
    const State k3 = f(x + (0.5 * h) * k2, u_half);
    const State k4 = f(x + h * k3, u_end);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <class Deriv, class InputAt>
Trajectory integrate(Deriv&& f, const State& x0, InputAt&& u_at, double t_end, double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw std::invalid_argument("rk4_integrate: step must be positive");
    if (!(t_end >= h)) throw std::invalid_argument("rk4_integrate: t_end must be >= h");
    if (!is_finite(x0)) throw std::invalid_argument("rk4_integrate: non-finite initial state");

    const auto n = static_cast<std::size_t>(std::llround(t_end / h));
    Trajectory traj;
    traj.t.reserve(n + 1);
    traj.x.reserve(n + 1);
    traj.u.reserve(n + 1);

    State x = x0;
    traj.t.push_back(0.0);
    traj.x.push_back(x);
    traj.u.push_back(u_at(0.0));
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * h;
        const double t1 = static_cast<double>(k + 1) * h;
        x = rk4_step(f, x, u_at(t), u_at(t + 0.5 * h), u_at(t1), h);
        if (!is_finite(x) || max_abs(x) > kDivergenceBound) throw DivergenceError(t1);
        traj.t.push_back(t1);
        traj.x.push_back(x);
        traj.u.push_back(u_at(t1));
    }
    return traj;
}

template <class Body>
Trajectory dispatch_path(DerivativePath path, const PlantParams& p, const ControlParams& c,
                         Body&& body) {
    if (path == DerivativePath::Blocks) {
        return body([&p, &c](const State& s, double u) {
            return blocks::block_derivative(p, c, s, u);
        });
    }
    const auto k = statespace::build_coefficients(p, c);
    return body([k, &p, &c](const State& s, double u) {
        return statespace::closed_loop_derivative(k, p, c, s, u);
    });
}

}  // namespace detail

// Classical 4th-order Runge-Kutta with the input evaluated analytically at
// the stage times.
inline Trajectory rk4_integrate(DerivativePath path, const PlantParams& p,
                                const ControlParams& c, const State& x0,
                                const InputSignal& input, double t_end, double h) {
    require_valid(p, c);
    validate_signal(input);
    return detail::dispatch_path(path, p, c, [&](auto&& f) {
        return detail::integrate(f, x0, [&input](double t) { return evaluate(input, t); },
                                 t_end, h);
    });
}

// Same integrator with the input held constant over each step (the staircase
// a zero-order-hold solution sees); used to compare against the exact
// discrete solution.
inline Trajectory rk4_integrate_held(DerivativePath path, const PlantParams& p,
                                     const ControlParams& c, const State& x0,
                                     std::span<const double> u_samples, double h) {
    require_valid(p, c);
    if (!(h > 0.0) || !std::isfinite(h))
        throw std::invalid_argument("rk4_integrate_held: step must be positive");
    return detail::dispatch_path(path, p, c, [&](auto&& f) {
        Trajectory traj;
        const std::size_t n = u_samples.size();
        traj.t.reserve(n + 1);
        traj.x.reserve(n + 1);
        traj.u.reserve(n + 1);
        State x = x0;
        traj.t.push_back(0.0);
        traj.x.push_back(x);
        traj.u.push_back(n > 0 ? u_samples[0] : 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double u = u_samples[k];
            x = detail::rk4_step(f, x, u, u, u, h);
            const double t1 = static_cast<double>(k + 1) * h;
            if (!is_finite(x) || max_abs(x) > kDivergenceBound) throw DivergenceError(t1);
            traj.t.push_back(t1);
            traj.x.push_back(x);
            traj.u.push_back(u_samples[std::min(k + 1, n - 1)]);
        }
        return traj;
    });
}

inline constexpr double kDefaultStep = 1e-3;  // [s]

// Free response on a level platform; the sway estimate starts on the true
// sway and stays there.
inline Trajectory condition1(const PlantParams& p, const ControlParams& c,
                             double t_end = 20.0, double h = kDefaultStep) {
    const State x0{std::numbers::pi / 10.0, 0.1, std::numbers::pi / 10.0, 0.0};
    return rk4_integrate(DerivativePath::Blocks, p, c, x0, Zero{}, t_end, h);
}

// The constant-tilt endpoint settles at the leak rate c_L (time constant
// 1/c_L = 80 s for the default parameters), so the default run covers many
// leak time constants; a 60 s run would still carry more than half of the
// transient.
inline constexpr double kCondition2Duration = 1500.0;  // [s]

// Free response on a tilted, motionless platform; a residual lean remains.
inline Trajectory condition2(const PlantParams& p, const ControlParams& c,
                             double t_end = kCondition2Duration, double h = kDefaultStep) {
    const State x0{std::numbers::pi / 10.0, 0.1, std::numbers::pi / 10.0,
                   std::numbers::pi / 15.0};
    return rk4_integrate(DerivativePath::Blocks, p, c, x0, Zero{}, t_end, h);
}

// Forced response to a sinusoidal platform tilt rate u = 0.1 cos(10 t).
inline Trajectory condition3(const PlantParams& p, const ControlParams& c,
                             double t_end = 20.0, double h = kDefaultStep) {
    return rk4_integrate(DerivativePath::Blocks, p, c, State{}, Sinusoid{0.1, 10.0, 0.0},
                         t_end, h);
}

// Per-sample signals derived from a trajectory; recomputable from the states
// and input alone.
struct SignalTrace {
    std::vector<double> alpha_BF;      // ankle angle [rad]
    std::vector<double> alpha_FS_hat;  // tilt estimate [rad]
    std::vector<double> epsilon;       // servo error [rad]
    std::vector<double> T_a;           // active torque [N m]
    std::vector<double> T_p;           // passive torque [N m]
    std::vector<double> T_G;           // gravity torque [N m]
};

inline SignalTrace derive_signals(const PlantParams& p, const ControlParams& c,
                                  const Trajectory& traj) {
    SignalTrace out;
    const std::size_t n = traj.size();
    out.alpha_BF.reserve(n);
    out.alpha_FS_hat.reserve(n);
    out.epsilon.reserve(n);
    out.T_a.reserve(n);
    out.T_p.reserve(n);
    out.T_G.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto L = blocks::loop_signals(c, traj.x[i], traj.u[i]);
        const auto T = blocks::torques(p, c, L, traj.x[i]);
        out.alpha_BF.push_back(L.alpha_BF);
        out.alpha_FS_hat.push_back(L.alpha_FS_hat);
        out.epsilon.push_back(L.epsilon);
        out.T_a.push_back(T.T_a);
        out.T_p.push_back(T.T_p);
        out.T_G.push_back(T.T_G);
    }
    return out;
}

}  // namespace decsim::sim

#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "decsim/model.hpp"
#include "decsim/trajectory.hpp"

namespace testutil {

// Standard plant and designed controller gains used throughout the suite.
inline decsim::PlantParams plant() { return {}; }
inline decsim::ControlParams ctrl() { return {}; }

inline std::mt19937& rng() {
    static std::mt19937 engine(0x5eed1234u);
    return engine;
}

inline double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(rng());
}

inline decsim::State random_state(double scale = 0.5) {
    return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale),
            uniform(-scale, scale)};
}

inline double max_component_diff(const decsim::State& a, const decsim::State& b) {
    return decsim::max_abs(a - b);
}

inline double max_trajectory_diff(const decsim::Trajectory& a, const decsim::Trajectory& b) {
    double worst = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst, max_component_diff(a.x[i], b.x[i]));
    return worst;
}

// Independent polynomial root-finder: eigenvalues of the companion matrix of
// lambda^3 + c2 lambda^2 + c1 lambda + c0, sorted by (Re, Im).
inline std::array<std::complex<double>, 3> companion_roots(const std::array<double, 3>& q) {
    Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
    C(0, 1) = 1.0;
    C(1, 2) = 1.0;
    C(2, 0) = -q[2];
    C(2, 1) = -q[1];
    C(2, 2) = -q[0];
    Eigen::EigenSolver<Eigen::Matrix3d> solver(C);
    std::array<std::complex<double>, 3> roots;
    for (int i = 0; i < 3; ++i) roots[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
    std::sort(roots.begin(), roots.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
              });
    return roots;
}

}  // namespace testutil

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "decsim/simulate.hpp"
#include "decsim/stability.hpp"

// Post-processing and experiment orchestration: peak-to-peak disturbance
// gain, the amplitude sweep, the closed-form steady-state lean, and the
// PD-gain stability-region grid. Sweep and region points are independent;
// they may run on several workers (capped by DEC_SIM_THREADS) with results
// written to fixed slots, so output order never depends on scheduling.

namespace decsim::analysis {

class UndefinedGainError : public std::runtime_error {
public:
    UndefinedGainError() : std::runtime_error("peak-to-peak platform tilt is zero; gain undefined") {}
};

namespace detail {

inline unsigned worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("DEC_SIM_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1)
            hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
        else
            hw = 1;
    }
    return hw;
}

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline double peak_to_peak(std::span<const double> v) {
    double lo = v[0], hi = v[0];
    for (const double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return hi - lo;
}

}  // namespace detail

// Ratio of body-sway to platform-tilt peak-to-peak amplitude, computed after
// discarding the leading discard_fraction of the run.
inline double peak_to_peak_gain(const Trajectory& traj, double discard_fraction = 0.5) {
    if (!(discard_fraction >= 0.0 && discard_fraction < 1.0))
        throw std::invalid_argument("discard_fraction must be in [0, 1)");
    if (traj.size() == 0) throw std::invalid_argument("empty trajectory");
    const auto start =
        static_cast<std::size_t>(std::floor(discard_fraction * static_cast<double>(traj.size())));
    std::vector<double> x1, x4;
    x1.reserve(traj.size() - start);
    x4.reserve(traj.size() - start);
    for (std::size_t i = start; i < traj.size(); ++i) {
        x1.push_back(traj.x[i].x1);
        x4.push_back(traj.x[i].x4);
    }
    const double pp4 = detail::peak_to_peak(x4);
    if (pp4 == 0.0) throw UndefinedGainError();
    return detail::peak_to_peak(x1) / pp4;
}

enum class Regime { Plateau, Transition, Asymptote, Undefined };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Plateau: return "plateau";
        case Regime::Transition: return "transition";
        case Regime::Asymptote: return "asymptote";
        case Regime::Undefined: return "undefined";
    }
    return "?";
}

struct GainCurve {
    std::vector<double> amplitudes;  // input tilt-rate amplitudes [rad/s], increasing
    std::vector<double> gains;       // dimensionless; NaN only on flagged rows
    std::vector<Regime> regimes;
};

struct SweepOptions {
    double t_end = 20.0;
    double h = sim::kDefaultStep;
    double discard_fraction = 0.5;
    // consecutive relative gain change below this labels the asymptote
    double asymptote_rel_change = 0.02;
    // when set, undefined gains become NaN rows labeled Undefined instead of
    // propagating the error
    bool flag_undefined = false;
};

inline std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("log_spaced: need hi > lo > 0");
    if (n < 2) throw std::invalid_argument("log_spaced: need at least 2 points");
    std::vector<double> out(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                    static_cast<double>(n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

// One forced run per amplitude (sinusoidal tilt rate at the given frequency,
// zero initial state), with the peak-to-peak gain of each. Points with
// amplitude below the dead-band half-width never leave the dead zone and are
// labeled as the plateau.
inline GainCurve sweep_gain(const PlantParams& p, const ControlParams& c,
                            std::span<const double> amplitudes, double omega,
                            const SweepOptions& opt = {}) {
    require_valid(p, c);
    if (!(omega > 0.0)) throw std::invalid_argument("sweep_gain: omega must be > 0");
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        if (!(amplitudes[i] > 0.0))
            throw std::invalid_argument("sweep_gain: amplitudes must be > 0");
        if (i > 0 && !(amplitudes[i] > amplitudes[i - 1]))
            throw std::invalid_argument("sweep_gain: amplitudes must be increasing");
    }

    GainCurve curve;
    curve.amplitudes.assign(amplitudes.begin(), amplitudes.end());
    curve.gains.assign(amplitudes.size(), 0.0);
    curve.regimes.assign(amplitudes.size(), Regime::Transition);

    detail::parallel_for(amplitudes.size(), [&](std::size_t i) {
        const auto traj =
            sim::rk4_integrate(sim::DerivativePath::Blocks, p, c, State{},
                               sim::Sinusoid{amplitudes[i], omega, 0.0}, opt.t_end, opt.h);
        try {
            curve.gains[i] = peak_to_peak_gain(traj, opt.discard_fraction);
        } catch (const UndefinedGainError&) {
            if (!opt.flag_undefined) throw;
            curve.gains[i] = std::numeric_limits<double>::quiet_NaN();
            curve.regimes[i] = Regime::Undefined;
        }
    });

    for (std::size_t i = 0; i < curve.gains.size(); ++i) {
        if (curve.regimes[i] == Regime::Undefined) continue;
        if (curve.amplitudes[i] < c.theta) {
            curve.regimes[i] = Regime::Plateau;
        } else if (i > 0 && curve.regimes[i - 1] != Regime::Undefined &&
                   curve.gains[i - 1] != 0.0 &&
                   std::abs(curve.gains[i] - curve.gains[i - 1]) <
                       opt.asymptote_rel_change * std::abs(curve.gains[i - 1])) {
            curve.regimes[i] = Regime::Asymptote;
        }
    }
    return curve;
}

// Closed-form fixed point of the free response over a constant tilt: setting
// the derivative to zero gives x3 = x1 - x4 and then
// x1 = alpha_FS (Kp_a + Kp_p) / (Kp_a + Kp_p + m g h_B - K_G).
inline double steady_state_lean(const PlantParams& p, const ControlParams& c,
                                double alpha_FS) {
    require_valid(p, c);
    const double K_G = gravity_gain(p, c);
    const double mgh = p.toppling_stiffness();
    const double num = c.Kp_a + p.Kp_p;
    const double den = c.Kp_a + p.Kp_p + mgh - K_G;
    const double scale = std::abs(c.Kp_a) + p.Kp_p + mgh + K_G;
    if (std::abs(den) <= 1e-12 * scale)
        throw std::domain_error("steady_state_lean: singular configuration (zero denominator)");
    if (!stability::routh_check(
            stability::characteristic_cubic(statespace::build_coefficients(p, c))))
        throw std::domain_error("steady_state_lean: parameter set is not stable");
    return alpha_FS * num / den;
}

struct RegionPoint {
    double Kp_a = 0.0;
    double Kd_a = 0.0;
    bool lemma1 = false;   // all three gain inequalities hold
    bool routh = false;    // Routh-Hurwitz verdict on the cubic
    bool numeric = false;  // all numeric cubic roots have Re < -1e-9
};

struct RegionMap {
    std::size_t n_Kp = 0;
    std::size_t n_Kd = 0;
    std::vector<RegionPoint> points;  // row-major, Kp_a outer and Kd_a inner
    // verdict comparisons over the grid
    int lemma1_routh_disagreements = 0;
    // routh vs numeric mismatches at points whose Routh margins all exceed
    // the boundary threshold; expected to be zero
    int routh_numeric_mismatches = 0;
    double boundary_margin = 1e-6;
};

// Evaluates all three stability verdicts over a rectangular (Kp_a, Kd_a)
// grid, keeping the remaining parameters from the template.
inline RegionMap stability_region(const PlantParams& p, const ControlParams& ctrl_template,
                                  std::pair<double, double> Kp_range,
                                  std::pair<double, double> Kd_range, std::size_t n_Kp,
                                  std::size_t n_Kd) {
    require_valid(p, ctrl_template);
    if (n_Kp < 2 || n_Kd < 2) throw std::invalid_argument("stability_region: grid must be >= 2x2");
    if (!std::isfinite(Kp_range.first) || !std::isfinite(Kp_range.second) ||
        !std::isfinite(Kd_range.first) || !std::isfinite(Kd_range.second))
        throw std::invalid_argument("stability_region: non-finite ranges");

    RegionMap map;
    map.n_Kp = n_Kp;
    map.n_Kd = n_Kd;
    map.points.resize(n_Kp * n_Kd);

    const auto grid_at = [](std::pair<double, double> r, std::size_t i, std::size_t n) {
        return r.first + (r.second - r.first) * static_cast<double>(i) /
                             static_cast<double>(n - 1);
    };

    detail::parallel_for(map.points.size(), [&](std::size_t idx) {
        const std::size_t ip = idx / n_Kd;
        const std::size_t id = idx % n_Kd;
        ControlParams c = ctrl_template;
        c.Kp_a = grid_at(Kp_range, ip, n_Kp);
        c.Kd_a = grid_at(Kd_range, id, n_Kd);

        RegionPoint& pt = map.points[idx];
        pt.Kp_a = c.Kp_a;
        pt.Kd_a = c.Kd_a;
        const auto lem = stability::lemma1_check(p, c);
        pt.lemma1 = lem[0] && lem[1] && lem[2];
        const auto cubic =
            stability::characteristic_cubic(statespace::build_coefficients(p, c));
        pt.routh = stability::routh_check(cubic);
        const auto roots = stability::cubic_roots(cubic);
        pt.numeric = true;
        for (const auto& z : roots)
            if (!(z.real() < -stability::kAxisTolerance)) pt.numeric = false;
    });

    for (const auto& pt : map.points) {
        if (pt.lemma1 != pt.routh) ++map.lemma1_routh_disagreements;
        ControlParams c = ctrl_template;
        c.Kp_a = pt.Kp_a;
        c.Kd_a = pt.Kd_a;
        const auto cubic =
            stability::characteristic_cubic(statespace::build_coefficients(p, c));
        const auto margin = std::min(
            {std::abs(cubic[0]), std::abs(cubic[2]), std::abs(cubic[0] * cubic[1] - cubic[2])});
        if (margin > map.boundary_margin && pt.routh != pt.numeric)
            ++map.routh_numeric_mismatches;
    }
    return map;
}

}  // namespace decsim::analysis

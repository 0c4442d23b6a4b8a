// Acceptance checklist for the balance-control simulator. Each criterion
// runs against the default plant and designed gains and prints one PASS/FAIL
// line; the process exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "decsim/analysis.hpp"
#include "decsim/blocks.hpp"
#include "decsim/simulate.hpp"
#include "decsim/stability.hpp"
#include "decsim/statespace.hpp"

using namespace decsim;

namespace {

constexpr double pi = std::numbers::pi;

struct Checker {
    std::string failures;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (!failures.empty()) failures += "; ";
            failures += what;
        }
    }
    void require_near(double got, double want, double tol, const std::string& what) {
        std::ostringstream os;
        os << what << " (got " << got << ", want " << want << " +- " << tol << ")";
        require(std::abs(got - want) <= tol, os.str());
    }
};

// Independent root-finder used as the eigenvalue oracle: companion-matrix
// eigenvalues, no shared code with stability::cubic_roots.
std::vector<std::complex<double>> companion_roots(const std::array<double, 3>& q) {
    Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
    C(0, 1) = 1.0;
    C(1, 2) = 1.0;
    C(2, 0) = -q[2];
    C(2, 1) = -q[1];
    C(2, 2) = -q[0];
    Eigen::EigenSolver<Eigen::Matrix3d> solver(C);
    std::vector<std::complex<double>> roots;
    for (int i = 0; i < 3; ++i) roots.push_back(solver.eigenvalues()[i]);
    std::sort(roots.begin(), roots.end(),
              [](auto a, auto b) { return a.real() < b.real(); });
    return roots;
}

std::string criterion1_lemma_gate() {
    const PlantParams p;
    const ControlParams c;
    Checker ck;
    const auto rep = stability::lemma1_report(p, c);
    ck.require(rep.all(), "an inequality is violated");
    const auto rel = [](double got, double want) {
        return std::abs(got - want) <= 1e-9 * std::abs(want);
    };
    ck.require(rel(rep.derivative_gain.rhs, -38.425625), "rhs1 off");
    ck.require(rel(rep.combined_gain.rhs, -299.0655), "rhs2 off");
    ck.require(rel(rep.proportional_gain.rhs, -298.574), "rhs3 off");
    return ck.failures;
}

std::string criterion2_classification() {
    const PlantParams p;
    const ControlParams c;
    Checker ck;
    const auto res = stability::classify_full(statespace::build_matrices(p, c));
    ck.require(res.classification == stability::Classification::LyapunovStable,
               "not Lyapunov stable");
    ck.require(res.classification != stability::Classification::AsymptoticallyStable,
               "must not be asymptotically stable");

    int zeros = 0;
    std::vector<std::complex<double>> nonzero;
    for (const auto& z : res.eigenvalues) {
        if (std::abs(z) <= 1e-9) ++zeros;
        else nonzero.push_back(z);
    }
    ck.require(zeros == 1, "expected exactly one zero eigenvalue");

    // oracle: independent root-finder on the frozen cubic coefficients
    const auto oracle = companion_roots({13.4392, 12.7665, 0.157483});
    std::sort(nonzero.begin(), nonzero.end(),
              [](auto a, auto b) { return a.real() < b.real(); });
    for (std::size_t i = 0; i < 3 && i < nonzero.size(); ++i)
        ck.require_near(nonzero[i].real(), oracle[i].real(), 1e-3, "eigenvalue vs oracle");
    for (const auto& z : nonzero)
        ck.require(std::abs(z.imag()) <= 1e-9, "eigenvalues should be real");
    return ck.failures;
}

std::string criterion3_condition1_identity() {
    const auto traj = sim::condition1(PlantParams{}, ControlParams{});
    double worst = 0.0;
    for (const auto& s : traj.x) worst = std::max(worst, std::abs(s.x3 - s.x1));
    Checker ck;
    std::ostringstream os;
    os << "max|x3 - x1| = " << worst;
    ck.require(worst <= 1e-9, os.str());
    return ck.failures;
}

std::string criterion4_condition2_steady_state() {
    const PlantParams p;
    const ControlParams c;
    Checker ck;
    const double lean = analysis::steady_state_lean(p, c, pi / 15.0);
    ck.require_near(lean, 0.2423, 1e-4, "closed-form lean");

    // The constant-tilt transient settles at the leak rate (1/c_L = 80 s), so
    // the endpoint is taken at the preset duration of 1500 s; at 60 s more
    // than half of the transient would remain.
    const auto traj = sim::condition2(p, c);
    ck.require_near(traj.x.back().x1, lean, 1e-6, "endpoint vs closed form");
    bool constant = true;
    for (const auto& s : traj.x)
        if (s.x4 != traj.x.front().x4) constant = false;
    ck.require(constant, "x4 not exactly constant");
    return ck.failures;
}

std::string criterion5_condition3_signature() {
    const PlantParams p;
    const ControlParams c;
    Checker ck;

    const auto nominal = sim::condition3(p, c);
    double worst = 0.0;
    for (std::size_t i = 0; i < nominal.size(); ++i)
        if (nominal.t[i] >= 10.0)
            worst = std::max(worst, std::abs(nominal.x[i].x3 - nominal.x[i].x1));
    std::ostringstream os;
    os << "max|x3 - x1| after 10 s = " << worst;
    ck.require(worst > 1e-4, os.str());

    ControlParams lin = c;
    lin.theta = 0.0;
    const auto linear = sim::condition3(p, lin);
    const double gain_nl = analysis::peak_to_peak_gain(nominal);
    const double gain_lin = analysis::peak_to_peak_gain(linear);
    std::ostringstream os2;
    os2 << "gain(theta=0) = " << gain_lin << " exceeds gain(theta=0.0028) = " << gain_nl
        << "; at this amplitude the dead-band correction cancels part of the "
           "passive-damping drive and lowers the response";
    ck.require(gain_lin <= gain_nl + 1e-9, os2.str());
    return ck.failures;
}

std::string criterion6_gain_curve_regimes() {
    const PlantParams p;
    const ControlParams c;
    Checker ck;

    setenv("DEC_SIM_THREADS", "1", 1);  // single-threaded for the runtime bound
    const auto amps = analysis::log_spaced(1e-4, 1.0, 25);
    const auto curve = analysis::sweep_gain(p, c, amps, 10.0);
    unsetenv("DEC_SIM_THREADS");

    // (a) sub-threshold plateau
    double plateau_lo = 1e300, plateau_hi = -1e300;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (amps[i] >= c.theta) continue;
        plateau_lo = std::min(plateau_lo, curve.gains[i]);
        plateau_hi = std::max(plateau_hi, curve.gains[i]);
    }
    ck.require((plateau_hi - plateau_lo) <= 1e-3 * plateau_hi, "plateau not flat to 1e-3");

    // (b) non-increasing within 1e-3 relative tolerance
    for (std::size_t i = 1; i < curve.gains.size(); ++i) {
        if (curve.gains[i] > curve.gains[i - 1] * (1.0 + 1e-3)) {
            std::ostringstream os;
            os << "gain increases from " << curve.gains[i - 1] << " to " << curve.gains[i]
               << " at amplitude " << amps[i]
               << "; the curve has a minimum near 0.1 rad/s and climbs back toward "
                  "its large-amplitude limit";
            ck.require(false, os.str());
            break;
        }
    }

    // (c) top two amplitudes within 2%
    const double gn = curve.gains[curve.gains.size() - 1];
    const double gp = curve.gains[curve.gains.size() - 2];
    std::ostringstream os;
    os << "top-two relative gap = " << std::abs(gn - gp) / gp
       << "; convergence toward the large-amplitude limit is slower than 2% per "
          "grid step at 1 rad/s";
    ck.require(std::abs(gn - gp) / gp < 0.02, os.str());
    return ck.failures;
}

std::string criterion7_dual_path_equivalence() {
    const PlantParams p;
    const ControlParams c;
    Checker ck;

    std::mt19937 rng(20250810u);
    std::uniform_real_distribution<double> dstate(-0.5, 0.5);
    std::uniform_real_distribution<double> dinput(-0.3, 0.3);
    const auto k = statespace::build_coefficients(p, c);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const State s{dstate(rng), dstate(rng), dstate(rng), dstate(rng)};
        const double u = dinput(rng);
        const State a = blocks::block_derivative(p, c, s, u);
        const State b = statespace::closed_loop_derivative(k, p, c, s, u);
        worst = std::max(worst, max_abs(a - b));
    }
    std::ostringstream os;
    os << "max derivative difference = " << worst;
    ck.require(worst <= 1e-10, os.str());

    const auto run = [&](int cond, sim::DerivativePath path) {
        if (cond == 1) {
            const State x0{pi / 10.0, 0.1, pi / 10.0, 0.0};
            return sim::rk4_integrate(path, p, c, x0, sim::Zero{}, 20.0, 1e-3);
        }
        if (cond == 2) {
            const State x0{pi / 10.0, 0.1, pi / 10.0, pi / 15.0};
            return sim::rk4_integrate(path, p, c, x0, sim::Zero{},
                                      sim::kCondition2Duration, 1e-3);
        }
        return sim::rk4_integrate(path, p, c, State{}, sim::Sinusoid{0.1, 10.0, 0.0},
                                  20.0, 1e-3);
    };
    for (int cond = 1; cond <= 3; ++cond) {
        const auto a = run(cond, sim::DerivativePath::Blocks);
        const auto b = run(cond, sim::DerivativePath::StateSpace);
        double traj_worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            traj_worst = std::max(traj_worst, max_abs(a.x[i] - b.x[i]));
        std::ostringstream os2;
        os2 << "preset " << cond << " path difference = " << traj_worst;
        ck.require(traj_worst <= 1e-9, os2.str());
    }
    return ck.failures;
}

std::string criterion8_integrator_oracle() {
    const PlantParams p;
    const ControlParams c;
    const auto m = statespace::build_matrices(p, c);
    Checker ck;

    // held forced input, 10 s at h = 1e-3
    {
        const double h = 1e-3;
        const std::size_t n = 10000;
        std::vector<double> u(n);
        for (std::size_t k = 0; k < n; ++k)
            u[k] = 0.1 * std::cos(10.0 * static_cast<double>(k) * h);
        const auto exact = stability::zoh_solution(m, State{}, u, h);
        const auto rk4 =
            sim::rk4_integrate_held(sim::DerivativePath::Blocks, p, c, State{}, u, h);
        double worst = 0.0;
        for (std::size_t i = 0; i < exact.size(); ++i)
            worst = std::max(worst, max_abs(exact.x[i] - rk4.x[i]));
        std::ostringstream os;
        os << "held-input discrepancy = " << worst;
        ck.require(worst <= 1e-8, os.str());
    }

    // fourth-order convergence against the exact reference
    {
        const State x0{0.05, 0.0, 0.0, 0.0};
        const auto error_at = [&](double h) {
            const auto n = static_cast<std::size_t>(std::llround(10.0 / h));
            const std::vector<double> u(n, 0.05);
            const auto exact = stability::zoh_solution(m, x0, u, h);
            const auto rk4 =
                sim::rk4_integrate_held(sim::DerivativePath::Blocks, p, c, x0, u, h);
            double worst = 0.0;
            for (std::size_t i = 0; i < exact.size(); ++i)
                worst = std::max(worst, max_abs(exact.x[i] - rk4.x[i]));
            return worst;
        };
        const double ratio = error_at(0.02) / error_at(0.01);
        std::ostringstream os;
        os << "error ratio when halving h = " << ratio;
        ck.require(ratio >= 16.0 * 0.8 && ratio <= 16.0 * 1.2, os.str());
    }
    return ck.failures;
}

std::string criterion9_deadband_suite() {
    const PlantParams p;
    ControlParams c;
    const double th = c.theta;
    Checker ck;

    ck.require(blocks::deadband(th, th) == 0.0, "deadband(theta) must be 0");
    ck.require(blocks::deadband(th, -th) == 0.0, "deadband(-theta) must be 0");
    ck.require(blocks::deadband(th, 0.0) == 0.0, "dead zone must map to 0");
    ck.require(blocks::deadband(th, 0.01) == 0.01 - th, "positive branch");
    ck.require(blocks::deadband(th, -0.01) == -(0.01 - th), "negative branch");

    std::mt19937 rng(7u);
    std::uniform_real_distribution<double> d(-0.05, 0.05);
    for (int i = 0; i < 1000; ++i) {
        const double v = d(rng);
        ck.require(blocks::deadband(th, -v) == -blocks::deadband(th, v), "odd symmetry");
        if (std::abs(v) < th) ck.require(blocks::deadband(th, v) == 0.0, "dead zone");
    }
    for (const double eps : {1e-12, 1e-10, 1e-8})
        ck.require(std::abs(blocks::deadband(th, th + eps)) <= eps * (1 + 1e-9) &&
                       std::abs(blocks::deadband(th, -th - eps)) <= eps * (1 + 1e-9),
                   "continuity at the breakpoints");

    c.theta = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double u = d(rng);
        const auto in = statespace::input_nonlinearities(p, c, u);
        ck.require(in.g == 0.0, "g must vanish for theta = 0");
        ck.require(in.f == -p.Kd_p * u, "f must reduce to -Kd_p u for theta = 0");
    }
    return ck.failures;
}

std::string criterion10_region_consistency() {
    const PlantParams p;
    const ControlParams c;
    Checker ck;
    const auto map =
        analysis::stability_region(p, c, {-3000.0, 500.0}, {-3000.0, 500.0}, 50, 50);
    std::ostringstream os;
    os << "Routh vs numeric mismatches off boundary = " << map.routh_numeric_mismatches;
    ck.require(map.routh_numeric_mismatches == 0, os.str());
    std::printf("          criterion 10 note: inequality-gate vs Routh disagreements on "
                "the grid: %d of %zu points (reported, not asserted)\n",
                map.lemma1_routh_disagreements, map.points.size());
    return ck.failures;
}

struct Criterion {
    int id;
    const char* name;
    double time_limit_s;
    std::function<std::string()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "gain-inequality gate with hand-evaluated margins", 1.0, criterion1_lemma_gate},
        {2, "Lyapunov-but-not-asymptotic classification and eigenvalues", 0.0,
         criterion2_classification},
        {3, "condition 1: estimate identical to sway", 5.0, criterion3_condition1_identity},
        {4, "condition 2: endpoint matches the closed-form lean", 0.0,
         criterion4_condition2_steady_state},
        {5, "condition 3: dead-band signature and gain ordering", 0.0,
         criterion5_condition3_signature},
        {6, "gain curve: plateau, monotonicity, asymptote", 120.0,
         criterion6_gain_curve_regimes},
        {7, "dual-path equivalence (derivatives and presets)", 0.0,
         criterion7_dual_path_equivalence},
        {8, "RK4 vs exact held-input solution and convergence order", 0.0,
         criterion8_integrator_oracle},
        {9, "dead-band unit suite", 0.0, criterion9_deadband_suite},
        {10, "region: Routh verdict equals numeric verdict off boundary", 30.0,
         criterion10_region_consistency},
    };

    int failed = 0;
    for (const auto& cr : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string message;
        try {
            message = cr.run();
        } catch (const std::exception& e) {
            message = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (cr.time_limit_s > 0.0 && elapsed > cr.time_limit_s) {
            if (!message.empty()) message += "; ";
            message += "runtime " + std::to_string(elapsed) + " s exceeds " +
                       std::to_string(cr.time_limit_s) + " s";
        }
        const bool ok = message.empty();
        if (!ok) ++failed;
        std::printf("%s  criterion %2d: %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", cr.id,
                    cr.name, elapsed, ok ? "" : " -- ", message.c_str());
    }
    if (failed > 0) std::printf("%d of 10 criteria failed\n", failed);
    else std::printf("all 10 criteria passed\n");
    return failed == 0 ? 0 : 1;
}

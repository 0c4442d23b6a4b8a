#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>

#include <Eigen/Dense>

#include "decsim/statespace.hpp"
#include "decsim/trajectory.hpp"

// Stability machinery: characteristic cubic of the non-integrator block, the
// PD-gain inequality gate, a Routh-Hurwitz check, an analytic cubic root
// solver, eigenvalue classification, and the exact matrix-exponential
// solution for zero-order-held inputs.

namespace decsim::stability {

// Eigenvalues with |Re| below this count as lying on the imaginary axis. The
// system matrices have entries of order 1e2 at most, so 1e-9 sits far above
// roundoff and far below any physically meaningful decay rate.
inline constexpr double kAxisTolerance = 1e-9;

// Coefficients [c2, c1, c0] of lambda^3 + c2 lambda^2 + c1 lambda + c0.
using Cubic = std::array<double, 3>;

inline Cubic characteristic_cubic(const statespace::Coefficients& k) {
    return {k.b - k.a2, -k.a3 - k.a2 * k.b - k.a1, -k.b * (k.a1 + k.a3)};
}

inline std::complex<double> cubic_eval(const Cubic& q, std::complex<double> z) {
    return ((z + q[0]) * z + q[1]) * z + q[2];
}

// One PD-gain inequality, lhs < rhs, with both sides evaluated.
struct Inequality {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds() const { return lhs < rhs; }
};

// The three gain inequalities that force positive cubic coefficients. They
// are equivalent to c2 > 0, c1 > 0, c0 > 0 (a sign-rule argument), which is
// necessary but not sufficient for all roots to lie in the open left
// half-plane; routh_check closes that gap.
struct Lemma1Report {
    Inequality derivative_gain;    // Kd_a < c_L J_B - Kd_p
    Inequality combined_gain;      // Kp_a + Kd_a c_L < K_G - mgh_B - Kp_p - c_L Kd_p
    Inequality proportional_gain;  // Kp_a < K_G - mgh_B - Kp_p

    std::array<bool, 3> flags() const {
        return {derivative_gain.holds(), combined_gain.holds(), proportional_gain.holds()};
    }
    bool all() const {
        const auto f = flags();
        return f[0] && f[1] && f[2];
    }
};

inline Lemma1Report lemma1_report(const PlantParams& p, const ControlParams& c) {
    const double K_G = gravity_gain(p, c);
    const double mgh = p.toppling_stiffness();
    Lemma1Report r;
    r.derivative_gain = {c.Kd_a, c.c_L * p.J_B - p.Kd_p};
    r.combined_gain = {c.Kp_a + c.Kd_a * c.c_L, K_G - mgh - p.Kp_p - c.c_L * p.Kd_p};
    r.proportional_gain = {c.Kp_a, K_G - mgh - p.Kp_p};
    return r;
}

inline std::array<bool, 3> lemma1_check(const PlantParams& p, const ControlParams& c) {
    return lemma1_report(p, c).flags();
}

// Necessary and sufficient condition for all roots of the cubic to lie in
// the open left half-plane.
inline bool routh_check(const Cubic& q) {
    return q[0] > 0.0 && q[2] > 0.0 && q[0] * q[1] > q[2];
}

// Smallest Routh margin; points with |margin| below a threshold sit on a
// verdict boundary.
inline double routh_margin(const Cubic& q) {
    return std::min({q[0], q[2], q[0] * q[1] - q[2]});
}

namespace detail {

inline void newton_polish(const Cubic& q, std::complex<double>& z) {
    for (int i = 0; i < 3; ++i) {
        const std::complex<double> pz = cubic_eval(q, z);
        const std::complex<double> dpz = (3.0 * z + 2.0 * q[0]) * z + q[1];
        if (std::abs(dpz) < 1e-300) break;
        const std::complex<double> step = pz / dpz;
        z -= step;
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(z))) break;
    }
}

}  // namespace detail

// Roots of lambda^3 + c2 lambda^2 + c1 lambda + c0, Cardano/trigonometric
// form with a Newton polish. Complex roots come as an exact conjugate pair;
// results are sorted by (Re, Im).
inline std::array<std::complex<double>, 3> cubic_roots(const Cubic& q) {
    using C = std::complex<double>;
    const double c2 = q[0], c1 = q[1], c0 = q[2];
    if (!std::isfinite(c2) || !std::isfinite(c1) || !std::isfinite(c0))
        throw std::invalid_argument("cubic_roots: non-finite coefficients");

    // depressed form t^3 + p t + s, lambda = t - c2/3
    const double shift = c2 / 3.0;
    const double p = c1 - c2 * c2 / 3.0;
    const double s = c0 - c2 * c1 / 3.0 + 2.0 * c2 * c2 * c2 / 27.0;

    std::array<C, 3> r;
    if (p == 0.0 && s == 0.0) {
        r = {C(-shift), C(-shift), C(-shift)};
    } else {
        const double disc = 0.25 * s * s + p * p * p / 27.0;
        if (disc > 0.0) {
            // one real root; take the larger-magnitude cube argument to avoid
            // cancellation, recover the partner from u*v = -p/3
            const double w = std::sqrt(disc);
            const double arg = (s <= 0.0) ? (-0.5 * s + w) : (-0.5 * s - w);
            const double u = std::cbrt(arg);
            const double t1 = (u == 0.0) ? 0.0 : u - p / (3.0 * u);
            // deflation: t^2 + t1 t + (t1^2 + p) has the conjugate pair
            const double im2 = 3.0 * t1 * t1 + 4.0 * p;
            const double im = 0.5 * std::sqrt(std::max(im2, 0.0));
            r = {C(t1 - shift), C(-0.5 * t1 - shift, im), C(-0.5 * t1 - shift, -im)};
        } else {
            // three real roots
            const double alpha = std::sqrt(-p / 3.0);
            const double cos3t = std::clamp(-0.5 * s / (alpha * alpha * alpha), -1.0, 1.0);
            const double t0 = std::acos(cos3t) / 3.0;
            constexpr double two_pi_3 = 2.0943951023931953;
            for (int k = 0; k < 3; ++k)
                r[k] = C(2.0 * alpha * std::cos(t0 - two_pi_3 * k) - shift);
        }
    }

    for (auto& z : r) {
        if (z.imag() == 0.0) {
            // keep real roots real through the polish
            double x = z.real();
            for (int i = 0; i < 3; ++i) {
                const double px = ((x + c2) * x + c1) * x + c0;
                const double dpx = (3.0 * x + 2.0 * c2) * x + c1;
                if (std::abs(dpx) < 1e-300) break;
                x -= px / dpx;
            }
            z = C(x);
        }
    }
    // polish one member of the complex pair, mirror the other
    for (std::size_t i = 0; i < 3; ++i) {
        if (r[i].imag() > 0.0) {
            detail::newton_polish(q, r[i]);
            for (std::size_t j = 0; j < 3; ++j)
                if (j != i && r[j].imag() < 0.0) r[j] = std::conj(r[i]);
            break;
        }
    }
    std::sort(r.begin(), r.end(), [](const C& a, const C& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return r;
}

enum class Classification { AsymptoticallyStable, LyapunovStable, Unstable };

inline const char* to_string(Classification c) {
    switch (c) {
        case Classification::AsymptoticallyStable: return "AsymptoticallyStable";
        case Classification::LyapunovStable: return "LyapunovStable";
        case Classification::Unstable: return "Unstable";
    }
    return "?";
}

struct ClassifyResult {
    Classification classification = Classification::Unstable;
    std::array<std::complex<double>, 4> eigenvalues{};
    // The integrator eigenvalue at 0 coincides with a cubic root at 0; the
    // verdict then rests on a rank test instead of simplicity.
    bool degenerate_zero = false;
};

// Classifies the closed-loop matrix per the eigenvalue definitions:
// asymptotically stable iff all eigenvalues lie strictly in the left
// half-plane, Lyapunov stable iff none lies in the right half-plane and
// every imaginary-axis eigenvalue is semisimple. Requires the zero last row
// (the integrator state), so 0 is always an eigenvalue and the asymptotic
// verdict is structurally unreachable.
inline ClassifyResult classify_full(const statespace::SystemMatrices& m) {
    const Eigen::Matrix4d& A = m.A;
    if (!A.allFinite()) throw std::invalid_argument("classify: non-finite matrix");
    if (A.row(3).cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument("classify: last row of A must be zero");

    // eig(A) = {0} union eig(upper-left 3x3 block); characteristic cubic of
    // the block via trace / principal minors / determinant
    const Eigen::Matrix3d B = A.topLeftCorner<3, 3>();
    const double tr = B.trace();
    const double minors = (B(0, 0) * B(1, 1) - B(0, 1) * B(1, 0)) +
                          (B(0, 0) * B(2, 2) - B(0, 2) * B(2, 0)) +
                          (B(1, 1) * B(2, 2) - B(1, 2) * B(2, 1));
    const Cubic q{-tr, minors, -B.determinant()};
    const auto roots = cubic_roots(q);

    ClassifyResult res;
    res.eigenvalues = {std::complex<double>(0.0), roots[0], roots[1], roots[2]};
    std::sort(res.eigenvalues.begin(), res.eigenvalues.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
              });

    const double tol = kAxisTolerance;

    bool right_half = false;
    bool all_left = true;
    std::size_t zeros = 1;  // the structural integrator eigenvalue
    bool imaginary_pair = false;
    for (const auto& z : roots) {
        if (z.real() > tol) right_half = true;
        if (z.real() >= -tol) all_left = false;
        if (std::abs(z) <= tol) ++zeros;
        else if (std::abs(z.real()) <= tol) imaginary_pair = true;
    }
    (void)imaginary_pair;  // a pure-imaginary conjugate pair of the cubic is
                           // simple, hence semisimple

    bool zero_semisimple = true;
    if (zeros > 1) {
        res.degenerate_zero = true;
        // geometric multiplicity of 0 = 4 - rank(A)
        const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
        Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
        lu.setThreshold(1e-12 * scale);
        zero_semisimple = (4 - lu.rank()) == static_cast<Eigen::Index>(zeros);
    }

    if (right_half || !zero_semisimple)
        res.classification = Classification::Unstable;
    else if (all_left && zeros == 0)
        res.classification = Classification::AsymptoticallyStable;  // unreachable here
    else
        res.classification = Classification::LyapunovStable;
    return res;
}

inline Classification classify(const statespace::SystemMatrices& m) {
    return classify_full(m).classification;
}

// Full stability report for one parameter set.
struct StabilityReport {
    Lemma1Report lemma1;
    std::array<bool, 3> lemma1_flags{};
    bool routh_ok = false;
    Cubic cubic{};
    std::array<std::complex<double>, 4> eigenvalues{};
    Classification classification = Classification::Unstable;
    bool degenerate_zero = false;
};

inline StabilityReport analyze(const PlantParams& p, const ControlParams& c) {
    require_valid(p, c);
    StabilityReport rep;
    rep.lemma1 = lemma1_report(p, c);
    rep.lemma1_flags = rep.lemma1.flags();
    const auto k = statespace::build_coefficients(p, c);
    rep.cubic = characteristic_cubic(k);
    rep.routh_ok = routh_check(rep.cubic);
    const auto cf = classify_full(statespace::build_matrices(p, c));
    rep.eigenvalues = cf.eigenvalues;
    rep.classification = cf.classification;
    rep.degenerate_zero = cf.degenerate_zero;
    return rep;
}

namespace detail {

// Pade approximant evaluation for expm: U = M * (odd part), V = even part,
// from precomputed even powers of M.
inline void pade_uv(const Eigen::MatrixXd& M, std::span<const double> b,
                    Eigen::MatrixXd& U, Eigen::MatrixXd& V) {
    const Eigen::Index n = M.rows();
    std::array<Eigen::MatrixXd, 5> even;  // I, M^2, M^4, M^6, M^8
    even[0] = Eigen::MatrixXd::Identity(n, n);
    even[1] = M * M;
    const std::size_t half = b.size() / 2;
    for (std::size_t k = 2; k < half; ++k) even[k] = even[k - 1] * even[1];
    Eigen::MatrixXd odd_sum = Eigen::MatrixXd::Zero(n, n);
    V = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < half; ++k) {
        odd_sum += b[2 * k + 1] * even[k];
        V += b[2 * k] * even[k];
    }
    U = M * odd_sum;
}

}  // namespace detail

// Matrix exponential by Pade approximation with scaling and squaring
// (degree-13 approximant above the last theta bound).
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols()) throw std::invalid_argument("expm: matrix must be square");
    if (!M.allFinite()) throw std::invalid_argument("expm: non-finite entries");
    const Eigen::Index n = M.rows();
    const double nrm = M.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm

    static constexpr double b3[] = {120, 60, 12, 1};
    static constexpr double b5[] = {30240, 15120, 3360, 420, 30, 1};
    static constexpr double b7[] = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
    static constexpr double b9[] = {17643225600, 8821612800, 2075673600, 302702400,
                                    30270240, 2162160, 110880, 3960, 90, 1};
    static constexpr double b13[] = {64764752532480000, 32382376266240000,
                                     7771770303897600, 1187353796428800, 129060195264000,
                                     10559470521600, 670442572800, 33522128640,
                                     1323241920, 40840800, 960960, 16380, 182, 1};

    Eigen::MatrixXd U, V;
    int squarings = 0;
    if (nrm <= 1.495585217958292e-2) {
        detail::pade_uv(M, b3, U, V);
    } else if (nrm <= 2.539398330063230e-1) {
        detail::pade_uv(M, b5, U, V);
    } else if (nrm <= 9.504178996162932e-1) {
        detail::pade_uv(M, b7, U, V);
    } else if (nrm <= 2.097847961257068) {
        detail::pade_uv(M, b9, U, V);
    } else {
        constexpr double theta13 = 5.371920351148152;
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / theta13))));
        const Eigen::MatrixXd Ms = M / std::exp2(squarings);
        // degree 13 splits the polynomial around M^6 to limit matrix products
        const Eigen::MatrixXd M2 = Ms * Ms;
        const Eigen::MatrixXd M4 = M2 * M2;
        const Eigen::MatrixXd M6 = M4 * M2;
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
        U = Ms * (M6 * (b13[13] * M6 + b13[11] * M4 + b13[9] * M2) +
                  b13[7] * M6 + b13[5] * M4 + b13[3] * M2 + b13[1] * I);
        V = M6 * (b13[12] * M6 + b13[10] * M4 + b13[8] * M2) +
            b13[6] * M6 + b13[4] * M4 + b13[2] * M2 + b13[0] * I;
    }

    Eigen::MatrixXd X = (V - U).partialPivLu().solve(V + U);
    for (int i = 0; i < squarings; ++i) X = X * X;
    return X;
}

// e^{A t} for t >= 0.
inline Eigen::Matrix4d matrix_exponential(const Eigen::Matrix4d& A, double t) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::invalid_argument("matrix_exponential: t must be finite and >= 0");
    return expm(Eigen::MatrixXd(A * t));
}

// Exact solution for a zero-order-held input: per step,
// x(t+h) = e^{Ah} x(t) + (int_0^h e^{A tau} dtau) B(u). The step and integral
// matrices come from one augmented-matrix exponential, so each step is exact
// for the held input up to roundoff.
inline Trajectory zoh_solution(const statespace::SystemMatrices& m, const State& x0,
                               std::span<const double> u_samples, double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw std::invalid_argument("zoh_solution: step must be positive");

    Eigen::Matrix<double, 8, 8> aug = Eigen::Matrix<double, 8, 8>::Zero();
    aug.topLeftCorner<4, 4>() = m.A * h;
    aug.topRightCorner<4, 4>() = Eigen::Matrix4d::Identity() * h;
    const Eigen::MatrixXd E = expm(aug);
    const Eigen::Matrix4d step = E.topLeftCorner<4, 4>();
    const Eigen::Matrix4d integral = E.topRightCorner<4, 4>();

    const std::size_t n = u_samples.size();
    Trajectory traj;
    traj.t.reserve(n + 1);
    traj.x.reserve(n + 1);
    traj.u.reserve(n + 1);
    Eigen::Vector4d x = statespace::to_vector(x0);
    traj.t.push_back(0.0);
    traj.x.push_back(x0);
    traj.u.push_back(n > 0 ? u_samples[0] : 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        x = step * x + integral * m.input(u_samples[k]);
        traj.t.push_back(static_cast<double>(k + 1) * h);
        traj.x.push_back(statespace::to_state(x));
        traj.u.push_back(u_samples[std::min(k + 1, n - 1)]);
    }
    return traj;
}

}  // namespace decsim::stability

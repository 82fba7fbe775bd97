// scalar_waves.hpp — odd 2L-periodic ring waves that vanish on the tail.
//
// The decoupled stationary problem on the ring,
//
//     -u'' - (p+1)|u|^{2p} u = omega u,   u(-L) = u(L) = 0,  u'(-L) = u'(L),
//
// has for every omega < omega_n = pi^2 n^2 / L^2 a pair of odd 2L-periodic
// solutions with 2n-1 interior zeros. Two constructions are provided:
//
//  * p = 1: the exact cn form. With 4nK(k) = 2aL the frequency relation is
//    omega L^2 = 4 n^2 (1 - 2k^2) K(k)^2, and the wave is an amplitude-scaled
//    translate of cn(.; k). The phase is fixed so that sign = '+' means
//    u'(0) > 0 (the normalization of the pair u^{+-}).
//
//  * any p > 0: one positive arch on [0, T], T = L/n, from the period-to-
//    energy map, extended to the ring by odd/even reflections. The map
//    T(u0) = 2 int_0^1 dx / sqrt(omega(1-x^2) + u0^{2p}(1-x^{2p+2})) is
//    strictly decreasing in the turning-point amplitude u0, so the amplitude
//    for a prescribed arch length is found by bisection; the arch itself is
//    a damped-Newton solve on a fine Dirichlet mesh seeded by an RK4
//    integration from the turning point.

#pragma once

#include <cmath>
#include <vector>

#include "tadpole/errors.hpp"
#include "tadpole/graph.hpp"
#include "tadpole/linalg.hpp"
#include "tadpole/special_functions.hpp"

namespace tadpole {

inline double omega_n_threshold(int n, double L) { return M_PI * M_PI * n * n / (L * L); }

// omega = 4 n^2 (1 - 2k^2) K(k)^2 / L^2
inline double omega_from_k(int n, double L, double k) {
    if (n < 1 || !(L > 0.0)) throw DomainError("omega_from_k: require n >= 1, L > 0");
    const double K = complete_K(k);
    return 4.0 * n * n * (1.0 - 2.0 * k * k) * K * K / (L * L);
}

// Inverse of omega_from_k by bisection; omega is strictly decreasing in k.
inline double k_from_omega(int n, double L, double omega) {
    if (n < 1 || !(L > 0.0)) throw DomainError("k_from_omega: require n >= 1, L > 0");
    const double wn = omega_n_threshold(n, L);
    if (omega >= wn) throw NoRoot("k_from_omega: omega must be below omega_n");
    double lo = 0.0, hi = 1.0 - 1e-12;
    if (omega_from_k(n, L, hi) > omega)
        throw NoRoot("k_from_omega: omega below the supported modulus range");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (omega_from_k(n, L, mid) > omega)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-16) break;
    }
    return 0.5 * (lo + hi);
}

// ── Period-to-energy map ─────────────────────────────────────────────────────

struct PeriodMapSample {
    double u0 = 0.0;     // turning-point amplitude
    double omega = 0.0;
    double p = 0.0;
    double E = 0.0;      // energy level (omega + u0^{2p}) u0^2
    double T = 0.0;      // half-period
};

namespace detail {

// Gauss-Legendre nodes/weights on [0,1], computed once.
struct Gauss20 {
    double x[20], w[20];
    Gauss20() {
        const int n = 20;
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p1 = 1.0, p2 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
                }
                pp = n * (z * p1 - p2) / (z * z - 1.0);
                const double z1 = z;
                z = z1 - p1 / pp;
                if (std::fabs(z - z1) < 1e-15) break;
            }
            x[i] = 0.5 * (1.0 - z);
            x[n - 1 - i] = 0.5 * (1.0 + z);
            w[i] = w[n - 1 - i] = 1.0 / ((1.0 - z * z) * pp * pp);
        }
    }
};

inline const Gauss20& gauss20() {
    static const Gauss20 g;
    return g;
}

// Composite Gauss-Legendre on [0,1].
template <class F>
double integrate01(const F& f, int panels = 8) {
    const Gauss20& g = gauss20();
    double s = 0.0;
    const double w = 1.0 / panels;
    for (int p = 0; p < panels; ++p) {
        const double a = p * w;
        for (int i = 0; i < 20; ++i) s += w * g.w[i] * f(a + w * g.x[i]);
    }
    return s;
}

}  // namespace detail

// Half-period of the closed trajectory with turning point u0. The endpoint
// singularity at x = 1 is removed by x = 1 - s^2; both vanishing factors are
// simple there, so the transformed integrand is analytic.
inline double period_T(double u0, double omega, double p) {
    if (!(u0 > 0.0) || !(p > 0.0)) throw DomainError("period_T: require u0 > 0, p > 0");
    const double u2p = std::pow(u0, 2.0 * p);
    const double E = (omega + u2p) * u0 * u0;
    if (!(E > 0.0)) throw DomainError("period_T: energy level must be positive");
    auto q = [&](double s) {
        const double s2 = s * s;
        // (1 - x^2)/s^2 with x = 1 - s^2, computed without cancellation
        const double one_minus_x2 = s2 * (2.0 - s2);
        const double t = -std::expm1((2.0 * p + 2.0) * std::log1p(-s2));  // 1 - x^{2p+2}
        const double D = omega * one_minus_x2 + u2p * t;
        return 4.0 / std::sqrt(D / s2);
    };
    return detail::integrate01(q);
}

inline PeriodMapSample period_map_sample(double u0, double omega, double p) {
    PeriodMapSample s;
    s.u0 = u0;
    s.omega = omega;
    s.p = p;
    s.E = (omega + std::pow(u0, 2.0 * p)) * u0 * u0;
    s.T = period_T(u0, omega, p);
    return s;
}

// Finds u0 with period_T(u0) = T_target by bisection (T is monotone in u0).
inline double invert_period(double T_target, double omega, double p) {
    if (!(T_target > 0.0)) throw NoAmplitude("invert_period: target half-period must be positive");
    if (omega > 0.0 && T_target >= M_PI / std::sqrt(omega))
        throw NoAmplitude("invert_period: half-period outside (0, pi/sqrt(omega))");
    double lo;
    if (omega < 0.0) {
        const double bound = std::pow(-omega, 1.0 / (2.0 * p));
        double delta = 1e-6;
        lo = bound * (1.0 + delta);
        while (period_T(lo, omega, p) < T_target) {
            delta *= 0.1;
            if (delta < 1e-15) throw NoAmplitude("invert_period: amplitude bracket collapsed");
            lo = bound * (1.0 + delta);
        }
    } else {
        lo = 1e-9;
        if (period_T(lo, omega, p) < T_target) {
            // exceedingly long arches need amplitudes even closer to zero
            while (lo > 1e-300 && period_T(lo, omega, p) < T_target) lo *= 1e-3;
            if (period_T(lo, omega, p) < T_target)
                throw NoAmplitude("invert_period: no amplitude bracket");
        }
    }
    double hi = std::max(2.0 * lo, 1.0);
    while (period_T(hi, omega, p) > T_target) {
        hi *= 2.0;
        if (hi > 1e12) throw NoAmplitude("invert_period: no upper amplitude bracket");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (period_T(mid, omega, p) > T_target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12 * std::max(1.0, lo)) break;
    }
    return 0.5 * (lo + hi);
}

// ── Single positive arch on (0, T) ──────────────────────────────────────────

struct Arch {
    double T = 0.0;        // arch length
    double step = 0.0;     // mesh spacing, T / (values.size() - 1)
    double u0 = 0.0;       // turning-point amplitude
    double E = 0.0;        // energy level
    int newton_iterations = 0;
    std::vector<double> values;  // values.front() = values.back() = 0
};

// Positive solution of -u'' - (p+1) u^{2p+1} = omega u on (0, T) with
// Dirichlet ends. RK4 from the turning point seeds a damped Newton solve of
// the central-difference system on the mesh.
inline Arch solve_arch(double omega, double p, double T, int mesh) {
    if (!(T > 0.0) || !(p > 0.0)) throw DomainError("solve_arch: require T > 0, p > 0");
    if (omega > 0.0 && T >= M_PI / std::sqrt(omega))
        throw DomainError("solve_arch: T outside the admissible range for omega >= 0");
    if (mesh < 8) mesh = 8;
    if (mesh % 2 != 0) ++mesh;

    Arch arch;
    arch.T = T;
    arch.step = T / mesh;
    arch.u0 = invert_period(T, omega, p);
    arch.E = (omega + std::pow(arch.u0, 2.0 * p)) * arch.u0 * arch.u0;
    arch.values.assign(mesh + 1, 0.0);

    // RK4 seed from the symmetric turning point at T/2 down to 0
    auto accel = [&](double u) { return -omega * u - (p + 1.0) * std::pow(u * u, p) * u; };
    {
        const double dstep = arch.step;
        double u = arch.u0, v = 0.0;
        arch.values[mesh / 2] = u;
        for (int i = mesh / 2; i > 0; --i) {
            const double k1u = -v, k1v = -accel(u);
            const double k2u = -(v + 0.5 * dstep * k1v), k2v = -accel(u + 0.5 * dstep * k1u);
            const double k3u = -(v + 0.5 * dstep * k2v), k3v = -accel(u + 0.5 * dstep * k2u);
            const double k4u = -(v + dstep * k3v), k4v = -accel(u + dstep * k3u);
            u += dstep / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += dstep / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            arch.values[i - 1] = std::max(0.0, u);
        }
        for (int i = 0; i < mesh / 2; ++i) arch.values[mesh - i] = arch.values[i];
        arch.values[0] = arch.values[mesh] = 0.0;
    }

    // Damped Newton on the interior mesh values
    const int m = mesh - 1;
    const double ih2 = 1.0 / (arch.step * arch.step);
    std::vector<double> u(arch.values.begin() + 1, arch.values.end() - 1);
    auto residual = [&](const std::vector<double>& w) {
        std::vector<double> r(m);
        for (int i = 0; i < m; ++i) {
            const double left = (i == 0) ? 0.0 : w[i - 1];
            const double right = (i == m - 1) ? 0.0 : w[i + 1];
            r[i] = (-left + 2.0 * w[i] - right) * ih2 - omega * w[i] -
                   (p + 1.0) * std::pow(w[i] * w[i], p) * w[i];
        }
        return r;
    };
    std::vector<double> r = residual(u);
    double rn = linalg::sup_norm(r);
    // the stencil evaluation carries ~eps/delta^2 rounding noise, which puts a
    // floor under the attainable residual on fine meshes
    const double eps_mach = std::numeric_limits<double>::epsilon();
    const double noise =
        16.0 * eps_mach * (2.0 * ih2 + std::fabs(omega) + (p + 1.0) * (2.0 * p + 1.0) *
                                                              std::pow(arch.u0, 2.0 * p)) *
        std::max(1.0, arch.u0);
    const double tol = std::max(1e-12 * std::max(1.0, arch.u0), noise);
    int iters = 0;
    while (rn > tol) {
        if (iters++ >= 40) throw NewtonDiverged("solve_arch: Newton did not converge");
        std::vector<double> sub(m - 1, -ih2), sup(m - 1, -ih2), diag(m);
        for (int i = 0; i < m; ++i)
            diag[i] = 2.0 * ih2 - omega -
                      (p + 1.0) * (2.0 * p + 1.0) * std::pow(u[i] * u[i], p);
        linalg::TridiagFactors F = linalg::tridiag_factor(sub, diag, sup);
        std::vector<double> step = linalg::tridiag_solve(F, r);
        double damp = 1.0;
        bool accepted = false;
        for (int bt = 0; bt <= 8; ++bt) {
            std::vector<double> trial(m);
            for (int i = 0; i < m; ++i) trial[i] = u[i] - damp * step[i];
            std::vector<double> rt = residual(trial);
            const double rtn = linalg::sup_norm(rt);
            if (rtn < rn) {
                u = std::move(trial);
                r = std::move(rt);
                rn = rtn;
                accepted = true;
                break;
            }
            damp *= 0.5;
        }
        if (!accepted) throw NewtonDiverged("solve_arch: damping failed to reduce residual");
    }
    arch.newton_iterations = iters;
    for (int i = 0; i < m; ++i) arch.values[i + 1] = u[i];
    return arch;
}

// ── Ring waves ───────────────────────────────────────────────────────────────

struct RingWave {
    int n = 1;
    int sign = +1;           // '+' means u'(0) > 0
    double omega = 0.0;
    double p = 1.0;
    double L = 0.0;
    std::vector<double> profile;    // ring interior values, grid ordering
    double derivative_at_L = 0.0;

    // continuous representation: exact cn form (p = 1) or fine arch table
    bool has_cn_form = false;
    double cn_k = 0.0, cn_K = 0.0, cn_amp = 0.0;
    Arch arch;

    // Evaluate the odd 2L-periodic wave at any x.
    double eval(double x) const {
        if (has_cn_form) {
            const double theta = 2.0 * n * cn_K * x / L - cn_K;
            return sign * cn_amp * jacobi_cn(theta, cn_k);
        }
        return arch_eval(x, false);
    }
    double eval_deriv(double x) const {
        if (has_cn_form) {
            const double theta = 2.0 * n * cn_K * x / L - cn_K;
            const JacobiTriple j = jacobi_sn_cn_dn(theta, cn_k);
            return sign * cn_amp * (2.0 * n * cn_K / L) * (-j.sn * j.dn);
        }
        return arch_eval(x, true);
    }

  private:
    double arch_eval(double x, bool deriv) const {
        // reduce to [-L, L) by 2L-periodicity, then use odd symmetry
        double y = std::fmod(x + L, 2.0 * L);
        if (y < 0.0) y += 2.0 * L;
        y -= L;
        double flip = 1.0;
        if (y < 0.0) {
            y = -y;
            flip = deriv ? 1.0 : -1.0;  // odd function, even derivative
        }
        const double T = arch.T;
        int j = static_cast<int>(std::floor(y / T));
        if (j > n - 1) j = n - 1;
        double s = y - j * T;
        const double arch_sign = (j % 2 == 0) ? 1.0 : -1.0;
        // 4-point Lagrange interpolation on the fine arch mesh
        const int m = static_cast<int>(arch.values.size()) - 1;
        double q = s / arch.step;
        int i0 = static_cast<int>(std::floor(q)) - 1;
        i0 = std::max(0, std::min(m - 3, i0));
        const double t = q - i0;
        const double* v = arch.values.data() + i0;
        double result;
        if (!deriv) {
            result = -v[0] * (t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0 +
                     v[1] * t * (t - 2.0) * (t - 3.0) / 2.0 -
                     v[2] * t * (t - 1.0) * (t - 3.0) / 2.0 +
                     v[3] * t * (t - 1.0) * (t - 2.0) / 6.0;
        } else {
            const double d0 = -((t - 1.0) * (t - 2.0) + (t - 1.0) * (t - 3.0) + (t - 2.0) * (t - 3.0)) / 6.0;
            const double d1 = (t * (t - 2.0) + t * (t - 3.0) + (t - 2.0) * (t - 3.0)) / 2.0;
            const double d2 = -(t * (t - 1.0) + t * (t - 3.0) + (t - 1.0) * (t - 3.0)) / 2.0;
            const double d3 = (t * (t - 1.0) + t * (t - 2.0) + (t - 1.0) * (t - 2.0)) / 6.0;
            result = (v[0] * d0 + v[1] * d1 + v[2] * d2 + v[3] * d3) / arch.step;
        }
        return flip * sign * arch_sign * result;
    }

  public:
    int count_interior_zeros() const {
        // nodes at numerical zero count once and absorb the adjacent sign change
        double amp = 0.0;
        for (double v : profile) amp = std::max(amp, std::fabs(v));
        const double tiny = 1e-10 * amp;
        int zeros = 0;
        double prev = 0.0;
        bool have_prev = false;
        for (double v : profile) {
            if (std::fabs(v) < tiny) {
                ++zeros;
                have_prev = false;
                continue;
            }
            if (have_prev && prev * v < 0.0) ++zeros;
            prev = v;
            have_prev = true;
        }
        return zeros;
    }

    GraphFunction embed_zero_tail(const TadpoleGrid& grid) const {
        GraphFunction f(grid);
        for (int j = 1; j < grid.n_ring; ++j) f[grid.ring_index(j)] = profile[j - 1];
        return f;
    }
};

// Exact p = 1 wave sampled on the ring grid. sign = +1 gives u'(0) > 0.
inline RingWave exact_cn_wave(int n, int sign, double omega, double L, const TadpoleGrid& grid) {
    RingWave w;
    w.n = n;
    w.sign = sign >= 0 ? +1 : -1;
    w.omega = omega;
    w.p = 1.0;
    w.L = L;
    w.has_cn_form = true;
    w.cn_k = k_from_omega(n, L, omega);
    w.cn_K = complete_K(w.cn_k);
    w.cn_amp = 2.0 * n * w.cn_k * w.cn_K / L;
    w.profile.resize(grid.n_ring - 1);
    for (int j = 1; j < grid.n_ring; ++j) w.profile[j - 1] = w.eval(grid.ring_x(j));
    const double kp = std::sqrt(1.0 - w.cn_k * w.cn_k);
    const double par = (n % 2 == 0) ? 1.0 : -1.0;
    w.derivative_at_L = w.sign * w.cn_amp * (2.0 * n * w.cn_K / L) * par * kp;
    return w;
}

// General-p wave: one positive arch on [0, L/n] reflected oddly onto the
// ring. The arch mesh refines each ring-grid cell so the restriction to the
// grid needs no interpolation.
inline RingWave assemble_ring_wave(int n, int sign, double omega, double p,
                                   const TadpoleGrid& grid, int refine = 64) {
    if (grid.n_ring % (2 * n) != 0)
        throw InvalidGeometry("assemble_ring_wave: n_ring must be divisible by 2n");
    RingWave w;
    w.n = n;
    w.sign = sign >= 0 ? +1 : -1;
    w.omega = omega;
    w.p = p;
    w.L = grid.L;
    const double T = grid.L / n;
    const int cells = grid.n_ring / (2 * n);  // ring-grid cells per arch
    if (refine % 2 != 0) ++refine;
    w.arch = solve_arch(omega, p, T, cells * refine);
    w.profile.assign(grid.n_ring - 1, 0.0);
    const int half = grid.n_ring / 2;
    for (int q = 1; q < half; ++q) {  // nodes at x = q h > 0
        const int fine = q * refine;
        const int arch_no = fine / (cells * refine);
        const int local = fine - arch_no * cells * refine;
        const double val = ((arch_no % 2 == 0) ? 1.0 : -1.0) * w.arch.values[local];
        w.profile[half + q - 1] = w.sign * val;
        w.profile[half - q - 1] = -w.sign * val;
    }
    w.profile[half - 1] = 0.0;  // x = 0
    const double par = (n % 2 == 0) ? 1.0 : -1.0;
    w.derivative_at_L = w.sign * par * std::sqrt(w.arch.E);
    return w;
}

// Energy invariant E(x) = (u')^2 + (omega + u^{2p}) u^2 along a ring wave,
// evaluated with centered differences at the ring interior nodes.
inline std::vector<double> energy_along_profile(const RingWave& w, const TadpoleGrid& grid) {
    std::vector<double> E;
    E.reserve(grid.n_ring - 1);
    auto value = [&](int j) -> double {  // j = 0..n_ring, ends are zero
        if (j <= 0 || j >= grid.n_ring) return 0.0;
        return w.profile[j - 1];
    };
    for (int j = 1; j < grid.n_ring; ++j) {
        const double du = (value(j + 1) - value(j - 1)) / (2.0 * grid.h);
        const double u = value(j);
        E.push_back(du * du + (w.omega + std::pow(u * u, w.p)) * u * u);
    }
    return E;
}

}  // namespace tadpole

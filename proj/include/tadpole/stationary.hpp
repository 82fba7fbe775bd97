// stationary.hpp — Newton solver for the coupled stationary system
//
//     -Delta phi - (p+1)|phi|^{2p} phi = omega phi
//
// on the discrete tadpole graph, with branch seeding and natural-parameter
// continuation in omega.
//
// Branches:
//   * primary          — never-vanishing wave bifurcating from zero at
//                        omega = 0: seeded by u = eps^{1/p} on the ring and
//                        v = eps^{1/p} phi0(eps (x - L)) on the tail,
//                        eps = sqrt(-omega).
//   * higher(n, sign)  — bifurcates from the ring wave u_{n,omega}: seeded by
//                        u(x) = u_eps(x + b) with b solved from
//                        u_eps(L + b) = eps^{1/p}, same soliton tail.
//   * vanishing_tail   — ring wave with v = 0. Solved in the ring-only
//                        sector (the tail stays exactly zero there), then the
//                        full-system residual is verified.
//
// The Newton correction uses the exact Jacobian A - omega I -
// (p+1)(2p+1)|phi|^{2p}, which is tridiagonal apart from the junction row and
// column; the linear solves go through a bordered tridiagonal factorization
// so a step costs O(N) even for very long tails.

#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tadpole/errors.hpp"
#include "tadpole/graph.hpp"
#include "tadpole/linalg.hpp"
#include "tadpole/scalar_waves.hpp"
#include "tadpole/special_functions.hpp"

namespace tadpole {

enum class BranchKind { primary, vanishing_tail, higher, generic };

struct Branch {
    BranchKind kind = BranchKind::generic;
    int n = 1;
    int sign = +1;

    static Branch primary() { return {BranchKind::primary, 1, +1}; }
    static Branch vanishing_tail(int n, int sign) { return {BranchKind::vanishing_tail, n, sign}; }
    static Branch higher(int n, int sign) { return {BranchKind::higher, n, sign}; }

    std::string label() const {
        switch (kind) {
            case BranchKind::primary: return "primary";
            case BranchKind::vanishing_tail:
                return "vanishing_tail:" + std::to_string(n) + (sign > 0 ? ":+" : ":-");
            case BranchKind::higher:
                return "higher:" + std::to_string(n) + (sign > 0 ? ":+" : ":-");
            default: return "generic";
        }
    }
};

struct NewtonOptions {
    double tol = 1e-10;      // sup-norm residual tolerance
    int max_iter = 50;
    int max_backtrack = 8;   // halving steps
};

struct Seed {
    GraphFunction phi;
    Branch branch;
};

struct StationaryWave {
    double omega = 0.0;
    double p = 1.0;
    Branch branch;
    GraphFunction profile;
    double residual_norm = 0.0;
    double flux_residual = 0.0;   // one-sided second-order u'(L) - u'(-L) - v'(L)
    double mass = 0.0;            // ||u||^2 + ||v||^2 under the lumped weights
    double ring_mass = 0.0;
    double tail_mass = 0.0;
    int iterations = 0;
};

struct ContinuationStalled : Error {
    std::vector<StationaryWave> partial;
    double failed_omega = 0.0;
    ContinuationStalled(const std::string& what, std::vector<StationaryWave> part, double w)
        : Error(what), partial(std::move(part)), failed_omega(w) {}
};

// A phi - omega phi - (p+1)|phi|^{2p} phi in unknown ordering.
inline GraphFunction residual(const GraphFunction& phi, double omega, double p) {
    const TadpoleGrid& g = *phi.grid;
    GraphFunction r(g);
    r.values = apply_neg_laplacian(g, phi.values);
    for (int i = 0; i < g.n_unknowns(); ++i) {
        const double u = phi.values[i];
        r.values[i] -= omega * u + (p + 1.0) * std::pow(u * u, p) * u;
    }
    return r;
}

namespace detail {

// Solves (A - diag(shift)) x = rhs through the internal ordering
// [ring interior, tail interior, junction]; A is the assembled -Delta.
inline std::vector<double> solve_shifted_system(const TadpoleGrid& g,
                                                const std::vector<double>& shift,
                                                const std::vector<double>& rhs) {
    const int N = g.n_unknowns();
    const int nr = g.n_ring, nt = g.n_tail;
    const int nT = N - 1;  // tridiagonal block size
    const int jw = g.junction_index();
    const double ih2 = 1.0 / (g.h * g.h);

    auto internal_of_spec = [&](int s) {
        if (s < nr - 1) return s;            // ring interior unchanged
        if (s == jw) return N - 1;           // junction moved last
        return s - 1;                        // tail shifted down by one
    };

    std::vector<double> diag(nT), sub(nT - 1, 0.0), sup(nT - 1, 0.0);
    for (int s = 0; s < N; ++s) {
        if (s == jw) continue;
        diag[internal_of_spec(s)] = 2.0 * ih2 - shift[s];
    }
    for (int i = 0; i + 1 < nr - 1; ++i) sub[i] = sup[i] = -ih2;   // ring block
    // no coupling between ring and tail blocks: sub[nr-2] stays zero
    for (int i = nr - 1; i + 1 < nT; ++i) sub[i] = sup[i] = -ih2;  // tail block

    std::vector<double> border_col(nT, 0.0), border_row(nT, 0.0);
    border_col[0] = -ih2;                       // u_1 row
    border_col[nr - 2] = -ih2;                  // u_{n_ring-1} row
    if (nt > 1) border_col[nr - 1] = -ih2;      // v_1 row
    border_row[0] = -(2.0 / 3.0) * ih2;
    border_row[nr - 2] = -(2.0 / 3.0) * ih2;
    if (nt > 1) border_row[nr - 1] = -(2.0 / 3.0) * ih2;
    const double corner = 2.0 * ih2 - shift[jw];

    std::vector<double> b(nT + 1);
    for (int s = 0; s < N; ++s) b[internal_of_spec(s)] = rhs[s];

    linalg::TridiagFactors F = linalg::tridiag_factor(sub, diag, sup);
    std::vector<double> xi = linalg::bordered_tridiag_solve(F, border_col, border_row, corner, b);

    std::vector<double> x(N);
    for (int s = 0; s < N; ++s) x[s] = xi[internal_of_spec(s)];
    return x;
}

inline double one_sided_flux_residual(const GraphFunction& phi) {
    const TadpoleGrid& g = *phi.grid;
    const double w = phi.junction();
    const double a = phi.ring_value(g.n_ring - 1), a2 = phi.ring_value(g.n_ring - 2);
    const double b = phi.ring_value(1), b2 = phi.ring_value(2);
    const double c = phi.tail_value(1), c2 = phi.tail_value(2);
    const double du_plus = (3.0 * w - 4.0 * a + a2) / (2.0 * g.h);
    const double du_minus = (-3.0 * w + 4.0 * b - b2) / (2.0 * g.h);
    const double dv = (-3.0 * w + 4.0 * c - c2) / (2.0 * g.h);
    return du_plus - du_minus - dv;
}

inline void fill_diagnostics(StationaryWave& wave) {
    const TadpoleGrid& g = *wave.profile.grid;
    wave.residual_norm = residual(wave.profile, wave.omega, wave.p).sup_norm();
    wave.flux_residual = one_sided_flux_residual(wave.profile);
    const double w = wave.profile.junction();
    double ring = g.h * w * w;  // two ring half-cells at the vertex
    for (int j = 1; j < g.n_ring; ++j) {
        const double u = wave.profile.ring_value(j);
        ring += g.h * u * u;
    }
    double tail = 0.5 * g.h * w * w;  // tail half-cell at the vertex
    for (int i = 1; i < g.n_tail; ++i) {
        const double v = wave.profile.tail_value(i);
        tail += g.h * v * v;
    }
    wave.ring_mass = ring;
    wave.tail_mass = tail;
    wave.mass = ring + tail;
}

// Ring-only damped Newton with the tail frozen at zero (invariant subspace of
// the vanishing-tail branches). Unknowns are the ring interior values with
// Dirichlet zero at the junction.
inline void newton_ring_sector(GraphFunction& phi, double omega, double p,
                               const NewtonOptions& opts, int& iterations) {
    const TadpoleGrid& g = *phi.grid;
    const int m = g.n_ring - 1;
    const double ih2 = 1.0 / (g.h * g.h);
    std::vector<double> u(m);
    for (int j = 1; j < g.n_ring; ++j) u[j - 1] = phi[g.ring_index(j)];
    auto res = [&](const std::vector<double>& w) {
        std::vector<double> r(m);
        for (int i = 0; i < m; ++i) {
            const double left = (i == 0) ? 0.0 : w[i - 1];
            const double right = (i == m - 1) ? 0.0 : w[i + 1];
            r[i] = (-left + 2.0 * w[i] - right) * ih2 - omega * w[i] -
                   (p + 1.0) * std::pow(w[i] * w[i], p) * w[i];
        }
        return r;
    };
    std::vector<double> r = res(u);
    double rn = linalg::sup_norm(r);
    iterations = 0;
    while (rn > opts.tol) {
        if (iterations >= opts.max_iter)
            throw NewtonDiverged("newton_ring_sector: max iterations reached");
        std::vector<double> sub(m - 1, -ih2), sup(m - 1, -ih2), diag(m);
        for (int i = 0; i < m; ++i)
            diag[i] = 2.0 * ih2 - omega -
                      (p + 1.0) * (2.0 * p + 1.0) * std::pow(u[i] * u[i], p);
        linalg::TridiagFactors F = linalg::tridiag_factor(sub, diag, sup);
        std::vector<double> step = linalg::tridiag_solve(F, r);
        ++iterations;
        double damp = 1.0;
        bool accepted = false;
        for (int bt = 0; bt <= opts.max_backtrack; ++bt) {
            std::vector<double> trial(m);
            for (int i = 0; i < m; ++i) trial[i] = u[i] - damp * step[i];
            std::vector<double> rt = res(trial);
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
        if (!accepted) throw NewtonDiverged("newton_ring_sector: damping failed");
    }
    for (int j = 1; j < g.n_ring; ++j) phi[g.ring_index(j)] = u[j - 1];
    phi.junction() = 0.0;
    for (int i = 1; i < g.n_tail; ++i) phi[g.tail_index(i)] = 0.0;
}

}  // namespace detail

// Damped Newton iteration for the full coupled system. The residual contract
// of the returned wave is independently checkable by re-evaluating residual().
inline StationaryWave newton_solve(const Seed& seed, double omega, double p,
                                   const NewtonOptions& opts = {}) {
    const TadpoleGrid& g = *seed.phi.grid;
    StationaryWave wave;
    wave.omega = omega;
    wave.p = p;
    wave.branch = seed.branch;
    wave.profile = seed.phi;

    if (seed.branch.kind == BranchKind::vanishing_tail) {
        detail::newton_ring_sector(wave.profile, omega, p, opts, wave.iterations);
        detail::fill_diagnostics(wave);
        if (wave.residual_norm > opts.tol)
            throw NewtonDiverged("newton_solve: ring-sector solution fails the full residual");
        return wave;
    }

    GraphFunction& phi = wave.profile;
    GraphFunction r = residual(phi, omega, p);
    double rn = r.sup_norm();
    while (rn > opts.tol) {
        if (wave.iterations >= opts.max_iter)
            throw NewtonDiverged("newton_solve: max iterations reached at omega=" +
                                 std::to_string(omega));
        std::vector<double> shift(g.n_unknowns());
        for (int i = 0; i < g.n_unknowns(); ++i) {
            const double u = phi.values[i];
            shift[i] = omega + (p + 1.0) * (2.0 * p + 1.0) * std::pow(u * u, p);
        }
        std::vector<double> step = detail::solve_shifted_system(g, shift, r.values);
        ++wave.iterations;
        double damp = 1.0;
        bool accepted = false;
        for (int bt = 0; bt <= opts.max_backtrack; ++bt) {
            GraphFunction trial = phi;
            for (int i = 0; i < g.n_unknowns(); ++i) trial.values[i] -= damp * step[i];
            GraphFunction rt = residual(trial, omega, p);
            const double rtn = rt.sup_norm();
            if (rtn < rn) {
                phi = std::move(trial);
                r = std::move(rt);
                rn = rtn;
                accepted = true;
                break;
            }
            damp *= 0.5;
        }
        if (!accepted)
            throw NewtonDiverged("newton_solve: damping failed to reduce the residual");
    }
    detail::fill_diagnostics(wave);
    return wave;
}

// Builds the reference ring wave for a branch: exact cn form when p = 1,
// arch assembly otherwise.
inline RingWave reference_ring_wave(int n, int sign, double omega, double p,
                                    const TadpoleGrid& grid) {
    if (p == 1.0) return exact_cn_wave(n, sign, omega, grid.L, grid);
    return assemble_ring_wave(n, sign, omega, p, grid);
}

// Seeds for the three branch families at omega = -eps^2.
inline Seed make_seed(const Branch& branch, double epsilon, double p, const TadpoleGrid& grid) {
    if (!(epsilon > 0.0)) throw DomainError("make_seed: epsilon must be positive");
    const double omega = -epsilon * epsilon;
    const double amp = std::pow(epsilon, 1.0 / p);
    Seed seed{GraphFunction(grid), branch};
    switch (branch.kind) {
        case BranchKind::primary: {
            for (int j = 1; j < grid.n_ring; ++j) seed.phi[grid.ring_index(j)] = amp;
            seed.phi.junction() = amp;
            for (int i = 1; i < grid.n_tail; ++i)
                seed.phi[grid.tail_index(i)] = amp * soliton_phi0(epsilon * (grid.tail_x(i) - grid.L), p);
            return seed;
        }
        case BranchKind::higher: {
            const RingWave u_eps = reference_ring_wave(branch.n, branch.sign, omega, p, grid);
            // 1-D Newton for the ring shift: u_eps(L + b) = eps^{1/p}
            double b = 0.0;
            bool found = false;
            for (int it = 0; it < 60; ++it) {
                const double f = u_eps.eval(grid.L + b) - amp;
                const double df = u_eps.eval_deriv(grid.L + b);
                if (std::fabs(df) < 1e-14)
                    throw NoShift("make_seed: flat ring wave in the shift equation");
                const double bn = b - f / df;
                if (std::fabs(bn - b) < 1e-13 * std::max(1.0, std::fabs(bn))) {
                    b = bn;
                    found = true;
                    break;
                }
                b = bn;
                if (std::fabs(b) > grid.L / branch.n)
                    throw NoShift("make_seed: ring shift left the first arch");
            }
            if (!found) throw NoShift("make_seed: shift equation did not converge");
            for (int j = 1; j < grid.n_ring; ++j)
                seed.phi[grid.ring_index(j)] = u_eps.eval(grid.ring_x(j) + b);
            seed.phi.junction() = u_eps.eval(grid.L + b);
            for (int i = 1; i < grid.n_tail; ++i)
                seed.phi[grid.tail_index(i)] = amp * soliton_phi0(epsilon * (grid.tail_x(i) - grid.L), p);
            return seed;
        }
        case BranchKind::vanishing_tail: {
            const RingWave u_eps = reference_ring_wave(branch.n, branch.sign, omega, p, grid);
            seed.phi = u_eps.embed_zero_tail(grid);
            return seed;
        }
        default:
            throw DomainError("make_seed: unsupported branch kind");
    }
}

// Seed for a vanishing-tail branch directly at a frequency (valid for any
// omega < omega_n, including nonnegative values).
inline Seed make_vanishing_tail_seed(int n, int sign, double omega, double p,
                                     const TadpoleGrid& grid) {
    Seed seed{GraphFunction(grid), Branch::vanishing_tail(n, sign)};
    seed.phi = reference_ring_wave(n, sign, omega, p, grid).embed_zero_tail(grid);
    return seed;
}

// Natural-parameter continuation; each wave is seeded from the previous one,
// with step halving on Newton failures down to 1/64 of the nominal step.
inline std::vector<StationaryWave> continue_branch(const Branch& branch, double omega_start,
                                                   double omega_end, int steps, double p,
                                                   const TadpoleGrid& grid,
                                                   const NewtonOptions& opts = {}) {
    if (steps < 2) throw DomainError("continue_branch: need at least two steps");
    std::vector<StationaryWave> out;
    out.reserve(steps);

    Seed seed = (branch.kind == BranchKind::vanishing_tail)
                    ? make_vanishing_tail_seed(branch.n, branch.sign, omega_start, p, grid)
                    : make_seed(branch, std::sqrt(-omega_start), p, grid);

    const double nominal = (omega_end - omega_start) / (steps - 1);
    const double floor_step = std::fabs(nominal) / 64.0;
    double omega_cur = omega_start;

    for (int s = 0; s < steps; ++s) {
        const double omega_target = omega_start + s * nominal;
        while (true) {
            const double gap = omega_target - omega_cur;
            double attempt = omega_target;
            StationaryWave wave;
            double delta = gap;
            while (true) {
                attempt = omega_cur + delta;
                bool solved = false;
                try {
                    wave = newton_solve(seed, attempt, p, opts);
                    solved = true;
                } catch (const NewtonDiverged&) {
                } catch (const SingularJacobian&) {
                }
                // falling onto the trivial solution means the step left the
                // branch; treat it like a failed step
                if (solved && wave.profile.sup_norm() < 1e-3 * seed.phi.sup_norm())
                    solved = false;
                if (solved) break;
                delta *= 0.5;
                if (std::fabs(delta) < floor_step)
                    throw ContinuationStalled(
                        s == 0 ? "continue_branch: first solve failed"
                               : "continue_branch: stalled near omega=" + std::to_string(omega_cur),
                        out, omega_target);
            }
            seed.phi = wave.profile;
            omega_cur = attempt;
            if (std::fabs(omega_cur - omega_target) <
                1e-14 * std::max(1.0, std::fabs(omega_target))) {
                out.push_back(std::move(wave));
                break;
            }
        }
    }
    return out;
}

struct Shifts {
    double a = 0.0;  // tail translation of the soliton
    double b = 0.0;  // ring shift against the reference ring wave (higher branches)
};

// Asymptotic diagnostics of the coupled branches: a from monotone inversion
// of the soliton at the junction, b from a least-squares shift fit of the
// ring profile against the reference ring wave.
//
// A converged discrete wave may overshoot the soliton maximum by an O(h^2)
// bias, so the default rejection threshold is grid-aware; overshoots beyond
// it indicate a wave that never converged to a coupled branch.
inline Shifts extract_shifts(const StationaryWave& wave, double overshoot_tol = -1.0) {
    if (!(wave.omega < 0.0)) throw DomainError("extract_shifts: coupled branches need omega < 0");
    const TadpoleGrid& g = *wave.profile.grid;
    if (overshoot_tol < 0.0) overshoot_tol = 0.05 + 100.0 * g.h * g.h;
    const double eps = std::sqrt(-wave.omega);
    const double amp = std::pow(eps, 1.0 / wave.p);
    Shifts s;

    const double y = wave.profile.junction() / amp;
    if (y <= 0.0) throw OutOfRange("extract_shifts: junction value is not positive");
    if (y > 1.0 + overshoot_tol)
        throw OutOfRange("extract_shifts: v(L) exceeds the soliton maximum; wave not converged");
    const double a_mag = (y >= 1.0) ? 0.0 : soliton_phi0_inverse(y, wave.p);
    const double w0 = wave.profile.junction();
    const double v1 = wave.profile.tail_value(1), v2 = wave.profile.tail_value(2);
    const double dv = (-3.0 * w0 + 4.0 * v1 - v2) / (2.0 * g.h);
    s.a = (dv > 0.0) ? -a_mag : a_mag;

    if (wave.branch.kind == BranchKind::higher) {
        const RingWave ref =
            reference_ring_wave(wave.branch.n, wave.branch.sign, wave.omega, wave.p, g);
        auto misfit = [&](double b) {
            double sum = 0.0;
            for (int j = 1; j < g.n_ring; ++j) {
                const double d = wave.profile.ring_value(j) - ref.eval(g.ring_x(j) + b);
                sum += d * d;
            }
            return sum;
        };
        const double half = 0.5 * g.L / wave.branch.n;
        // coarse bracket scan, then golden-section refinement
        int best = 0;
        double best_val = std::numeric_limits<double>::max();
        const int scan = 80;
        for (int i = 0; i <= scan; ++i) {
            const double b = -half + 2.0 * half * i / scan;
            const double v = misfit(b);
            if (v < best_val) {
                best_val = v;
                best = i;
            }
        }
        double lo = -half + 2.0 * half * std::max(0, best - 1) / scan;
        double hi = -half + 2.0 * half * std::min(scan, best + 1) / scan;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
        double fc = misfit(c), fd = misfit(d);
        for (int it = 0; it < 90 && hi - lo > 1e-12; ++it) {
            if (fc < fd) {
                hi = d;
                d = c;
                fd = fc;
                c = hi - gr * (hi - lo);
                fc = misfit(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + gr * (hi - lo);
                fd = misfit(d);
            }
        }
        s.b = 0.5 * (lo + hi);
    }
    return s;
}

}  // namespace tadpole

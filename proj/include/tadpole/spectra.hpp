// spectra.hpp — self-adjoint linearizations around stationary waves.
//
//   L_minus = -Delta - omega - (p+1)      |phi|^{2p}
//   L_plus  = -Delta - omega - (2p+1)(p+1)|phi|^{2p}
//
// on the tadpole graph (same Kirchhoff vertex stencil as the Laplacian),
// plus the 2L-periodic ring operators M_-/M_+ whose even eigenvalue curves
// mu(omega) decide, by their crossings of the anti-diagonal lambda = -omega,
// how many isolated "second group" eigenvalues the graph operators carry.
//
// The half-line Evans function
//
//     F(Lambda) = V'(0; Lambda) / V(0; Lambda)
//
// is evaluated by integrating -V'' + V - c sech^2(pz) V = Lambda V inward
// from z_max = 40 / sqrt(1 - Lambda) with the pure-exponential normalization
// V ~ e^{-sqrt(1-Lambda) z}; its unique zero on (-inf, 0) locates the
// negative eigenvalue of the soliton linearization.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tadpole/errors.hpp"
#include "tadpole/graph.hpp"
#include "tadpole/linalg.hpp"
#include "tadpole/scalar_waves.hpp"
#include "tadpole/stationary.hpp"

namespace tadpole {

enum class WhichOperator { minus, plus };

inline double potential_coefficient(WhichOperator which, double p) {
    return which == WhichOperator::minus ? (p + 1.0) : (2.0 * p + 1.0) * (p + 1.0);
}

inline double default_zero_tol(const TadpoleGrid& g) { return 10.0 * g.h * g.h; }

// Matrix of L_minus / L_plus in unknown ordering: A - omega I - c |phi|^{2p}.
inline linalg::Matrix assemble_linearization(const StationaryWave& wave, WhichOperator which) {
    const TadpoleGrid& g = *wave.profile.grid;
    linalg::Matrix A = assemble_laplacian(g);
    const double c = potential_coefficient(which, wave.p);
    for (int i = 0; i < g.n_unknowns(); ++i) {
        const double u = wave.profile.values[i];
        A(i, i) -= wave.omega + c * std::pow(u * u, wave.p);
    }
    return A;
}

struct SpectrumReport {
    std::string operator_tag;
    double omega = 0.0;
    std::vector<double> eigenvalues;  // ascending
    int n_neg = 0;                    // eigenvalues < -zero_tol
    int n_zero = 0;                   // |eigenvalue| <= zero_tol
    double zero_tol = 0.0;
    double essential_edge = 0.0;      // -omega; discrete values above it are continuum debris
    std::vector<int> parity;          // +1 even / -1 odd (periodic ring operators only)
    linalg::Matrix vectors;           // eigenvectors when requested
};

// Eigenvalues of the weighted-symmetrized operator with negative/zero counts.
inline SpectrumReport symmetric_eigs(const linalg::Matrix& op, const std::vector<double>& weights,
                                     double zero_tol, double omega,
                                     const std::string& tag = "", bool want_vectors = false) {
    SpectrumReport rep;
    rep.operator_tag = tag;
    rep.omega = omega;
    rep.zero_tol = zero_tol;
    rep.essential_edge = -omega;
    linalg::Matrix S = symmetrize(op, weights);
    linalg::SymEigResult e = linalg::sym_eig(std::move(S), want_vectors);
    rep.eigenvalues = std::move(e.values);
    if (want_vectors) rep.vectors = std::move(e.vectors);
    for (double lam : rep.eigenvalues) {
        if (lam < -zero_tol) ++rep.n_neg;
        else if (std::fabs(lam) <= zero_tol) ++rep.n_zero;
    }
    return rep;
}

inline SpectrumReport operator_spectrum(const StationaryWave& wave, WhichOperator which,
                                        double zero_tol = -1.0, bool want_vectors = false) {
    const TadpoleGrid& g = *wave.profile.grid;
    if (zero_tol < 0.0) zero_tol = default_zero_tol(g);
    return symmetric_eigs(assemble_linearization(wave, which), mass_weights(g), zero_tol,
                          wave.omega, which == WhichOperator::minus ? "L_minus" : "L_plus",
                          want_vectors);
}

// ── Periodic ring operators M_-/M_+ ─────────────────────────────────────────

// M = -d^2/dx^2 - omega - c |u_{n,omega}|^{2p} on [-L, L) with periodic wrap.
// Eigenvectors are tagged by parity under x -> -x; degenerate clusters are
// rotated into definite-parity combinations first.
inline SpectrumReport periodic_M_eigs(int n, int sign, double omega, double p,
                                      WhichOperator which, const TadpoleGrid& grid,
                                      double zero_tol = -1.0) {
    if (zero_tol < 0.0) zero_tol = default_zero_tol(grid);
    const int m = grid.n_ring;
    const double ih2 = 1.0 / (grid.h * grid.h);
    const double c = potential_coefficient(which, p);
    // at the spectral edge omega_n the wave amplitude vanishes; the operators
    // degenerate continuously to the potential-free ones
    const bool zero_wave = omega >= omega_n_threshold(n, grid.L) * (1.0 - 1e-12);
    std::vector<double> values(m, 0.0);
    if (!zero_wave) {
        const RingWave wave = reference_ring_wave(n, sign, omega, p, grid);
        for (int j = 1; j < m; ++j) values[j] = wave.profile[j - 1];
    }

    linalg::Matrix M(m, m);
    for (int j = 0; j < m; ++j) {
        const double u = values[j];
        M(j, j) = 2.0 * ih2 - omega - c * std::pow(u * u, p);
        M(j, (j + 1) % m) -= ih2;
        M(j, (j + m - 1) % m) -= ih2;
    }
    linalg::SymEigResult e = linalg::sym_eig(M, true);

    SpectrumReport rep;
    rep.operator_tag = which == WhichOperator::minus ? "M_minus" : "M_plus";
    rep.omega = omega;
    rep.zero_tol = zero_tol;
    rep.essential_edge = -omega;
    rep.eigenvalues = e.values;
    rep.parity.assign(m, 0);
    rep.vectors = linalg::Matrix(m, m);

    // node j = n_ring/2 is x = 0; reflection maps node j to node (m - j) mod m ... shifted
    const int half = m / 2;
    auto reflect_index = [&](int j) {
        // x_j = -L + j h; -x_j corresponds to index m - j with index 0 <-> -L = L
        int r = (m - j) % m;
        return r;
    };
    (void)half;

    int col = 0;
    while (col < m) {
        int hi = col + 1;
        const double scale = std::max(1.0, std::fabs(e.values[col]));
        while (hi < m && std::fabs(e.values[hi] - e.values[col]) < 1e-8 * scale) ++hi;
        const int dim = hi - col;
        if (dim == 1) {
            std::vector<double> v(m), rv(m);
            for (int i = 0; i < m; ++i) v[i] = e.vectors(i, col);
            for (int i = 0; i < m; ++i) rv[i] = v[reflect_index(i)];
            double even_norm = 0.0, odd_norm = 0.0;
            for (int i = 0; i < m; ++i) {
                even_norm += (v[i] + rv[i]) * (v[i] + rv[i]);
                odd_norm += (v[i] - rv[i]) * (v[i] - rv[i]);
            }
            rep.parity[col] = even_norm >= odd_norm ? +1 : -1;
            for (int i = 0; i < m; ++i) rep.vectors(i, col) = v[i];
        } else {
            // project the cluster onto definite-parity combinations
            for (int q = col; q < hi; ++q) {
                std::vector<double> v(m), rv(m);
                for (int i = 0; i < m; ++i) v[i] = e.vectors(i, q);
                for (int i = 0; i < m; ++i) rv[i] = v[reflect_index(i)];
                std::vector<double> even(m), odd(m);
                double en = 0.0, on = 0.0;
                for (int i = 0; i < m; ++i) {
                    even[i] = 0.5 * (v[i] + rv[i]);
                    odd[i] = 0.5 * (v[i] - rv[i]);
                    en += even[i] * even[i];
                    on += odd[i] * odd[i];
                }
                // keep the dominant-parity part of this cluster member
                if (en >= on) {
                    rep.parity[q] = +1;
                    const double nn = std::sqrt(en);
                    for (int i = 0; i < m; ++i) rep.vectors(i, q) = even[i] / nn;
                } else {
                    rep.parity[q] = -1;
                    const double nn = std::sqrt(on);
                    for (int i = 0; i < m; ++i) rep.vectors(i, q) = odd[i] / nn;
                }
            }
        }
        col = hi;
    }
    for (double lam : rep.eigenvalues) {
        if (lam < -zero_tol) ++rep.n_neg;
        else if (std::fabs(lam) <= zero_tol) ++rep.n_zero;
    }
    return rep;
}

// ── Crossing tracking (Table-1 logic) ────────────────────────────────────────

struct CrossingEvent {
    int curve = 0;            // index among the tracked even curves (ascending)
    double omega_lo = 0.0;    // bracketing grid samples (omega_lo > omega_hi)
    double omega_hi = 0.0;
    double omega_estimate = 0.0;
    bool appears = true;      // true: mu + omega goes above -> below (new eigenvalue)
    bool at_grid_start = false;
};

struct CrossingReport {
    int n = 1;
    int sign = +1;
    WhichOperator which = WhichOperator::minus;
    std::vector<double> omega_grid;
    std::vector<std::vector<double>> even_curves;  // [curve][sample]
    std::vector<CrossingEvent> events;
    int predicted_second_group = 0;  // curves below the anti-diagonal at the grid end
    std::vector<std::string> warnings;
};

// Follows the lowest even-parity eigenvalue curves mu(omega) of M_-/M_+ over
// a descending omega grid and classifies crossings of mu(omega) = -omega.
// A curve already below the anti-diagonal at the first sample is reported as
// an appearance at the grid start (departure from the spectral edge).
inline CrossingReport track_crossings(int n, int sign, const std::vector<double>& omega_grid,
                                      double p, WhichOperator which, const TadpoleGrid& grid,
                                      int n_curves = -1) {
    if (omega_grid.size() < 2) throw DomainError("track_crossings: need at least two samples");
    for (size_t i = 1; i < omega_grid.size(); ++i)
        if (!(omega_grid[i] < omega_grid[i - 1]))
            throw DomainError("track_crossings: omega grid must be strictly descending");
    if (n_curves < 1) n_curves = n + 2;

    CrossingReport rep;
    rep.n = n;
    rep.sign = sign;
    rep.which = which;
    rep.omega_grid = omega_grid;
    rep.even_curves.assign(n_curves, std::vector<double>(omega_grid.size(), 0.0));

    for (size_t s = 0; s < omega_grid.size(); ++s) {
        const SpectrumReport m = periodic_M_eigs(n, sign, omega_grid[s], p, which, grid);
        int c = 0;
        for (size_t j = 0; j < m.eigenvalues.size() && c < n_curves; ++j) {
            if (m.parity[j] == +1) rep.even_curves[c++][s] = m.eigenvalues[j];
        }
        if (c < n_curves) throw Error("track_crossings: fewer even curves than requested");
    }

    for (int c = 0; c < n_curves; ++c) {
        const std::vector<double>& mu = rep.even_curves[c];
        std::vector<double> gval(mu.size());
        for (size_t s = 0; s < mu.size(); ++s) gval[s] = mu[s] + omega_grid[s];
        if (gval[0] < 0.0) {
            CrossingEvent ev;
            ev.curve = c;
            ev.omega_lo = ev.omega_hi = ev.omega_estimate = omega_grid[0];
            ev.appears = true;
            ev.at_grid_start = true;
            rep.events.push_back(ev);
        }
        for (size_t s = 0; s + 1 < gval.size(); ++s) {
            if (gval[s] == 0.0) continue;
            if (gval[s] * gval[s + 1] < 0.0) {
                CrossingEvent ev;
                ev.curve = c;
                ev.omega_lo = omega_grid[s];
                ev.omega_hi = omega_grid[s + 1];
                const double t = gval[s] / (gval[s] - gval[s + 1]);
                ev.omega_estimate = omega_grid[s] + t * (omega_grid[s + 1] - omega_grid[s]);
                ev.appears = gval[s] > 0.0;  // above -> below as omega decreases
                rep.events.push_back(ev);
            }
            // curvature heuristic: a parabola through three same-sign samples
            // dipping through zero inside the middle cell means two crossings
            // were skipped
            if (s + 2 < gval.size() && gval[s] * gval[s + 1] > 0.0 &&
                gval[s + 1] * gval[s + 2] > 0.0) {
                const double y0 = gval[s], y1 = gval[s + 1], y2 = gval[s + 2];
                const double ext = y1 - 0.125 * (y2 - y0) * (y2 - y0) / (y0 - 2.0 * y1 + y2 + 1e-300);
                if ((y0 - 2.0 * y1 + y2) != 0.0 && ext * y1 < 0.0) {
                    rep.warnings.push_back("possible double crossing between omega=" +
                                           std::to_string(omega_grid[s]) + " and " +
                                           std::to_string(omega_grid[s + 2]) +
                                           " on even curve " + std::to_string(c));
                }
            }
        }
        if (gval.back() < 0.0) ++rep.predicted_second_group;
    }
    return rep;
}

// ── Evans function on the half line ──────────────────────────────────────────

namespace detail {

// Dormand-Prince 5(4) for the 2-component system y' = f(z, y).
template <class F>
void dopri5(const F& f, double z0, double z1, double y[2], double rtol) {
    double z = z0;
    double h = (z1 - z0) * 0.01;
    const double hmin = std::fabs(z1 - z0) * 1e-14;
    int guard = 0;
    while ((z1 - z) * (z1 - z0) > 0.0) {
        if (++guard > 2000000) throw Error("dopri5: step budget exhausted");
        if ((z + h - z1) * (z1 - z0) > 0.0) h = z1 - z;
        double k1[2], k2[2], k3[2], k4[2], k5[2], k6[2], k7[2], yt[2], y5[2], y4[2];
        f(z, y, k1);
        for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (0.2 * k1[i]);
        f(z + 0.2 * h, yt, k2);
        for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (3.0 / 40.0 * k1[i] + 9.0 / 40.0 * k2[i]);
        f(z + 0.3 * h, yt, k3);
        for (int i = 0; i < 2; ++i)
            yt[i] = y[i] + h * (44.0 / 45.0 * k1[i] - 56.0 / 15.0 * k2[i] + 32.0 / 9.0 * k3[i]);
        f(z + 0.8 * h, yt, k4);
        for (int i = 0; i < 2; ++i)
            yt[i] = y[i] + h * (19372.0 / 6561.0 * k1[i] - 25360.0 / 2187.0 * k2[i] +
                                64448.0 / 6561.0 * k3[i] - 212.0 / 729.0 * k4[i]);
        f(z + 8.0 / 9.0 * h, yt, k5);
        for (int i = 0; i < 2; ++i)
            yt[i] = y[i] + h * (9017.0 / 3168.0 * k1[i] - 355.0 / 33.0 * k2[i] +
                                46732.0 / 5247.0 * k3[i] + 49.0 / 176.0 * k4[i] -
                                5103.0 / 18656.0 * k5[i]);
        f(z + h, yt, k6);
        for (int i = 0; i < 2; ++i)
            y5[i] = y[i] + h * (35.0 / 384.0 * k1[i] + 500.0 / 1113.0 * k3[i] +
                                125.0 / 192.0 * k4[i] - 2187.0 / 6784.0 * k5[i] +
                                11.0 / 84.0 * k6[i]);
        f(z + h, y5, k7);
        for (int i = 0; i < 2; ++i)
            y4[i] = y[i] + h * (5179.0 / 57600.0 * k1[i] + 7571.0 / 16695.0 * k3[i] +
                                393.0 / 640.0 * k4[i] - 92097.0 / 339200.0 * k5[i] +
                                187.0 / 2100.0 * k6[i] + 1.0 / 40.0 * k7[i]);
        double err = 0.0;
        const double scale0 = std::max(std::fabs(y[0]), std::fabs(y5[0]));
        const double scale1 = std::max(std::fabs(y[1]), std::fabs(y5[1]));
        const double sk = rtol * std::max({scale0, scale1, 1e-30});
        for (int i = 0; i < 2; ++i) err = std::max(err, std::fabs(y5[i] - y4[i]) / sk);
        if (err <= 1.0) {
            z += h;
            y[0] = y5[0];
            y[1] = y5[1];
        }
        const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        h *= fac;
        if (std::fabs(h) < hmin) throw Error("dopri5: step size underflow");
    }
}

}  // namespace detail

struct EvansSample {
    double Lambda = 0.0;
    double p = 1.0;
    double a = 0.0;  // soliton shift of the potential
    double F = 0.0;  // V'(0; Lambda) / V(0; Lambda)
};

// F(Lambda) = V'(0)/V(0) for -V'' + V - c sech^2(p(z+a)) V = Lambda V, where
// c = (2p+1)(p+1) for the plus linearization and (p+1) for the minus one.
// Defined where V(0; Lambda) != 0, which holds on Lambda < 0.
inline EvansSample evans_sample(double Lambda, double p, double a = 0.0,
                                WhichOperator which = WhichOperator::plus) {
    if (!(Lambda < 1.0)) throw DomainError("evans_sample: Lambda must be below the branch point 1");
    if (!(p > 0.0)) throw DomainError("evans_sample: power must be positive");
    const double c = potential_coefficient(which, p);
    const double kappa = std::sqrt(1.0 - Lambda);
    const double z_max = 40.0 / kappa + std::fabs(a);
    double y[2] = {1.0, -kappa};  // scaled; F is invariant under scaling
    auto rhs = [&](double z, const double* v, double* dv) {
        const double sech = 1.0 / std::cosh(p * (z + a));
        dv[0] = v[1];
        dv[1] = (1.0 - Lambda - c * sech * sech) * v[0];
    };
    detail::dopri5(rhs, z_max, 0.0, y, 1e-12);
    if (y[0] == 0.0) throw Error("evans_sample: V(0) vanished");
    return {Lambda, p, a, y[1] / y[0]};
}

inline double evans_F(double Lambda, double p, WhichOperator which = WhichOperator::plus) {
    return evans_sample(Lambda, p, 0.0, which).F;
}

// Unique zero of F on (-inf, 0): bracket by geometric sampling, then bisect.
inline double find_Lambda0(double p, WhichOperator which = WhichOperator::plus) {
    double lo_start = -10.0;
    for (int widen = 0; widen < 5; ++widen) {
        std::vector<double> samples;
        for (double x = -1e-4; x > lo_start; x *= 2.0) samples.push_back(x);
        samples.push_back(lo_start);
        double prev_L = samples[0];
        double prev_F = evans_F(prev_L, p, which);
        for (size_t i = 1; i < samples.size(); ++i) {
            const double Li = samples[i];
            const double Fi = evans_F(Li, p, which);
            if (prev_F == 0.0) return prev_L;
            if (prev_F * Fi < 0.0) {
                double a = Li, b = prev_L;  // a < b, sign change inside
                double Fa = Fi;
                for (int it = 0; it < 100; ++it) {
                    const double mid = 0.5 * (a + b);
                    const double Fm = evans_F(mid, p, which);
                    if (Fm == 0.0) return mid;
                    if ((Fm < 0.0) == (Fa < 0.0)) {
                        a = mid;
                        Fa = Fm;
                    } else {
                        b = mid;
                    }
                    if (b - a < 1e-12 * std::max(1.0, std::fabs(a))) break;
                }
                return 0.5 * (a + b);
            }
            prev_L = Li;
            prev_F = Fi;
        }
        lo_start *= 4.0;
    }
    throw NoBracket("find_Lambda0: no sign change of F on the search interval");
}

}  // namespace tadpole

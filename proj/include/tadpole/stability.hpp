// stability.hpp — the non-self-adjoint spectral stability problem
//
//     L_plus U = -lambda W,   L_minus W = lambda U.
//
// Eliminating W gives L_minus L_plus U = -lambda^2 U, so the full spectrum is
// recovered from the product P = L_minus L_plus (in weighted-symmetrized
// form) through lambda = +-sqrt(-mu): real positive mu give imaginary pairs,
// real negative mu give real pairs, and complex mu give quartets
// {lambda, -lambda, conj(lambda), -conj(lambda)}.
// A direct 2N block formulation [[0, L_minus], [-L_plus, 0]] serves as the
// oracle for the product route on small grids.
//
// Discrete eigenvalues approximating the continuum segments +-i[-omega, inf)
// are filtered into a separate bucket and never classified as modes.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "tadpole/errors.hpp"
#include "tadpole/graph.hpp"
#include "tadpole/linalg.hpp"
#include "tadpole/spectra.hpp"
#include "tadpole/stationary.hpp"

namespace tadpole {

using linalg::cdouble;

enum class StabilityVerdict { spectrally_stable, unstable_real, unstable_complex, mixed };

inline std::string verdict_name(StabilityVerdict v) {
    switch (v) {
        case StabilityVerdict::spectrally_stable: return "spectrally_stable";
        case StabilityVerdict::unstable_real: return "unstable_real";
        case StabilityVerdict::unstable_complex: return "unstable_complex";
        default: return "mixed";
    }
}

struct StabilityTolerances {
    double tol_re = 0.0;
    double tol_im = 0.0;
    double zero_tol = 0.0;  // continuum-edge guard
};

inline StabilityTolerances default_stability_tolerances(const TadpoleGrid& g) {
    const double t = 10.0 * g.h * g.h;
    return {t, t, t};
}

struct StabilityReport {
    double omega = 0.0;
    Branch branch;
    std::vector<cdouble> lambda_set;      // symmetric under conjugation and negation
    std::vector<cdouble> continuum;       // filtered discretized-continuum values
    int n_real_pairs = 0;
    int n_imag_pairs = 0;                 // discrete pairs below the continuum edge
    int n_quartets = 0;
    int n_zero_modes = 0;
    StabilityVerdict verdict = StabilityVerdict::spectrally_stable;
    StabilityTolerances tol;
    bool complete = true;                 // false when QR hit its iteration cap
};

// Classify the lambda content of the product spectrum {mu}.
inline StabilityReport classify_product_spectrum(const std::vector<cdouble>& mu_values,
                                                 double omega, const Branch& branch,
                                                 const StabilityTolerances& tol) {
    StabilityReport rep;
    rep.omega = omega;
    rep.branch = branch;
    rep.tol = tol;
    const double edge = -omega - tol.zero_tol;
    int quartet_members = 0;
    for (const cdouble& mu : mu_values) {
        const cdouble lam = std::sqrt(-mu);  // principal branch: Re >= 0
        rep.lambda_set.push_back(lam);
        rep.lambda_set.push_back(-lam);
        const double re = std::fabs(lam.real());
        const double im = std::fabs(lam.imag());
        if (re <= tol.tol_re && im <= tol.tol_im) {
            ++rep.n_zero_modes;
        } else if (im <= tol.tol_im && re > tol.tol_re) {
            ++rep.n_real_pairs;
        } else if (re <= tol.tol_re) {
            if (im >= edge)
                rep.continuum.push_back(lam);
            else
                ++rep.n_imag_pairs;
        } else {
            ++quartet_members;
        }
    }
    rep.n_quartets = quartet_members / 2;
    if (rep.n_real_pairs > 0 && rep.n_quartets > 0)
        rep.verdict = StabilityVerdict::mixed;
    else if (rep.n_real_pairs > 0)
        rep.verdict = StabilityVerdict::unstable_real;
    else if (rep.n_quartets > 0)
        rep.verdict = StabilityVerdict::unstable_complex;
    else
        rep.verdict = StabilityVerdict::spectrally_stable;
    return rep;
}

// Weighted-symmetrized linearization pair around a wave.
struct LinearizationPair {
    linalg::Matrix S_minus;
    linalg::Matrix S_plus;
};

inline LinearizationPair symmetrized_linearizations(const StationaryWave& wave) {
    const std::vector<double> w = mass_weights(*wave.profile.grid);
    return {symmetrize(assemble_linearization(wave, WhichOperator::minus), w),
            symmetrize(assemble_linearization(wave, WhichOperator::plus), w)};
}

inline StabilityReport stability_spectrum(const StationaryWave& wave,
                                          StabilityTolerances tol = {}) {
    const TadpoleGrid& g = *wave.profile.grid;
    if (tol.tol_re == 0.0 && tol.tol_im == 0.0 && tol.zero_tol == 0.0)
        tol = default_stability_tolerances(g);
    LinearizationPair lin = symmetrized_linearizations(wave);
    const linalg::Matrix P = linalg::matmul(lin.S_minus, lin.S_plus);
    try {
        std::vector<cdouble> mu = linalg::nonsym_eigenvalues(P);
        return classify_product_spectrum(mu, wave.omega, wave.branch, tol);
    } catch (const linalg::QRPartial& e) {
        StabilityReport rep = classify_product_spectrum(e.partial, wave.omega, wave.branch, tol);
        rep.complete = false;
        return rep;
    }
}

// Direct 2N block matrix [[0, S_minus], [-S_plus, 0]]; eigenvalues are the
// lambda themselves. Oracle for the product route.
inline linalg::Matrix build_block_stability_matrix(const linalg::Matrix& S_minus,
                                                   const linalg::Matrix& S_plus) {
    const int n = S_minus.rows;
    linalg::Matrix B(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            B(i, n + j) = S_minus(i, j);
            B(n + i, j) = -S_plus(i, j);
        }
    return B;
}

inline std::vector<cdouble> block_stability_eigenvalues(const StationaryWave& wave) {
    LinearizationPair lin = symmetrized_linearizations(wave);
    linalg::Matrix B = build_block_stability_matrix(lin.S_minus, lin.S_plus);
    return linalg::nonsym_eigenvalues(B);
}

// The stability problem carries an exact 2x2 Jordan block at the origin (the
// L_minus kernel paired with the frequency direction), which backward-stable
// eigensolvers split by ~ +-sqrt(eps ||B||) in an arbitrary direction. When
// two independently computed spectra are compared, those splits must be
// collapsed back onto the structural zero first.
inline void snap_zero_modes(std::vector<cdouble>& lams, double radius = 1e-4) {
    for (cdouble& lam : lams)
        if (std::abs(lam) < radius) lam = 0.0;
}

// Greedy nearest matching between two complex multisets; returns the largest
// matching distance (or throws if sizes differ).
inline double match_spectra(std::vector<cdouble> a, std::vector<cdouble> b) {
    if (a.size() != b.size()) throw SectorMismatch("match_spectra: size mismatch");
    double worst = 0.0;
    std::vector<bool> used(b.size(), false);
    for (const cdouble& x : a) {
        double best = std::numeric_limits<double>::max();
        size_t arg = 0;
        for (size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(x - b[j]);
            if (d < best) {
                best = d;
                arg = j;
            }
        }
        used[arg] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

// ── Odd/even reduced sector problems for vanishing-tail waves ────────────────
//
// Odd sector: ring only, Dirichlet at x = 0 and x = L.
// Even sector: half ring with Neumann at x = 0, junction coupled to the tail
// with the doubled flux 2U'(L) = V'(L), Dirichlet clamp at L_inf.

struct SectorOperators {
    linalg::Matrix S_minus;  // weighted-symmetrized
    linalg::Matrix S_plus;
};

namespace detail {

// half_values[j] is the wave value at x = j h, j = 0..n_ring/2.
inline linalg::Matrix sector_operator(const TadpoleGrid& g, const std::vector<double>& half_values,
                                      double omega, double p, WhichOperator which,
                                      bool even_sector, std::vector<double>* weights_out) {
    const double ih2 = 1.0 / (g.h * g.h);
    const double c = potential_coefficient(which, p);
    const int half = g.n_ring / 2;
    auto pot = [&](double u) { return omega + c * std::pow(u * u, p); };
    auto ring_u = [&](int j) { return half_values[j]; };
    if (!even_sector) {
        const int m = half - 1;  // x = h .. L - h
        linalg::Matrix A(m, m);
        for (int i = 0; i < m; ++i) {
            A(i, i) = 2.0 * ih2 - pot(ring_u(i + 1));
            if (i > 0) A(i, i - 1) = -ih2;
            if (i + 1 < m) A(i, i + 1) = -ih2;
        }
        if (weights_out) weights_out->assign(m, 2.0 * g.h);
        return A;
    }
    // even sector: [x=0, x=h..L-h, junction, tail interior]
    const int m = half + g.n_tail;  // 1 + (half-1) + 1 + (n_tail-1)
    const int jw = half;            // junction position in sector ordering
    linalg::Matrix A(m, m);
    A(0, 0) = 2.0 * ih2 - pot(ring_u(0));
    A(0, 1) = -2.0 * ih2;  // Neumann fold at x = 0
    for (int i = 1; i < half; ++i) {
        A(i, i) = 2.0 * ih2 - pot(ring_u(i));
        A(i, i - 1) = -ih2;
        if (i + 1 < half) A(i, i + 1) = -ih2;
        else A(i, jw) = -ih2;
    }
    A(jw, jw) = 2.0 * ih2 - pot(0.0);
    A(jw, half - 1) = -(4.0 / 3.0) * ih2;  // doubled ring edge
    A(jw, jw + 1) = -(2.0 / 3.0) * ih2;
    for (int i = 1; i < g.n_tail; ++i) {
        const int row = jw + i;
        A(row, row) = 2.0 * ih2 - pot(0.0);
        A(row, row - 1) = -ih2;
        if (i + 1 < g.n_tail) A(row, row + 1) = -ih2;
    }
    if (weights_out) {
        weights_out->assign(m, g.h);
        (*weights_out)[0] = g.h;            // x = 0 carries the full interior cell
        for (int i = 1; i < half; ++i) (*weights_out)[i] = 2.0 * g.h;
        (*weights_out)[jw] = 1.5 * g.h;
        // tail keeps weight h
    }
    return A;
}

}  // namespace detail

struct SectorSpectra {
    StabilityReport odd;
    StabilityReport even;
    std::vector<cdouble> odd_lambdas;   // principal-branch values, one per mu
    std::vector<cdouble> even_lambdas;
    LinearizationPair odd_ops;          // weighted-symmetrized sector operators
    LinearizationPair even_ops;
};

// Decoupled odd/even spectral stability problems of a vanishing-tail wave.
// The potential is the wave's own discrete profile, so the union reproduces
// the full-graph stability spectrum of the same wave exactly.
inline SectorSpectra reduced_sector_spectra(const StationaryWave& wave,
                                            StabilityTolerances tol = {}) {
    const TadpoleGrid& grid = *wave.profile.grid;
    if (wave.profile.max_abs_tail() > 1e-10)
        throw DomainError("reduced_sector_spectra: wave must have a vanishing tail");
    if (tol.tol_re == 0.0 && tol.tol_im == 0.0 && tol.zero_tol == 0.0)
        tol = default_stability_tolerances(grid);
    const int half = grid.n_ring / 2;
    std::vector<double> half_values(half + 1, 0.0);
    for (int j = 0; j <= half; ++j) half_values[j] = wave.profile.ring_value(half + j);
    const double omega = wave.omega;
    const double p = wave.p;
    SectorSpectra out;
    const Branch branch = wave.branch;
    for (int pass = 0; pass < 2; ++pass) {
        const bool even = pass == 1;
        std::vector<double> w;
        linalg::Matrix Am =
            detail::sector_operator(grid, half_values, omega, p, WhichOperator::minus, even, &w);
        linalg::Matrix Ap =
            detail::sector_operator(grid, half_values, omega, p, WhichOperator::plus, even, nullptr);
        linalg::Matrix Sm = symmetrize(Am, w);
        linalg::Matrix Sp = symmetrize(Ap, w);
        const linalg::Matrix P = linalg::matmul(Sm, Sp);
        std::vector<cdouble> mu = linalg::nonsym_eigenvalues(P);
        StabilityReport rep = classify_product_spectrum(mu, omega, branch, tol);
        std::vector<cdouble> lams;
        lams.reserve(mu.size());
        for (const cdouble& m : mu) lams.push_back(std::sqrt(-m));
        if (even) {
            out.even = std::move(rep);
            out.even_lambdas = std::move(lams);
            out.even_ops = {std::move(Sm), std::move(Sp)};
        } else {
            out.odd = std::move(rep);
            out.odd_lambdas = std::move(lams);
            out.odd_ops = {std::move(Sm), std::move(Sp)};
        }
    }
    return out;
}

inline SectorSpectra reduced_sector_spectra(int n, int sign, double omega, double p,
                                            const TadpoleGrid& grid,
                                            StabilityTolerances tol = {}) {
    StationaryWave wave =
        newton_solve(make_vanishing_tail_seed(n, sign, omega, p, grid), omega, p);
    return reduced_sector_spectra(wave, tol);
}

// Union consistency: sector spectra against the full-graph spectrum, both
// computed through the 2N block formulation (linear norm, so the eigensolver
// noise stays far below the tolerance, unlike the squared-norm product).
// Returns the worst matched distance; throws SectorMismatch above tolerance.
inline double check_sector_union(const StationaryWave& wave, const SectorSpectra& sectors,
                                 double tol = 1e-6) {
    std::vector<cdouble> full_lam = block_stability_eigenvalues(wave);
    std::vector<cdouble> sector_lam;
    for (const LinearizationPair* ops : {&sectors.odd_ops, &sectors.even_ops}) {
        linalg::Matrix B = build_block_stability_matrix(ops->S_minus, ops->S_plus);
        std::vector<cdouble> lam = linalg::nonsym_eigenvalues(B);
        sector_lam.insert(sector_lam.end(), lam.begin(), lam.end());
    }
    snap_zero_modes(full_lam);
    snap_zero_modes(sector_lam);
    const double worst = match_spectra(full_lam, sector_lam);
    if (worst > tol)
        throw SectorMismatch("check_sector_union: spectra differ by " + std::to_string(worst));
    return worst;
}

// ── Krein-type sign estimate ─────────────────────────────────────────────────
//
// For a discrete imaginary pair lambda = i beta the standard energy form
// <U, L_plus U> + <W, L_minus W> decides the signature. U is recovered by
// inverse iteration on P at mu = beta^2; W follows from L_plus U = -lambda W,
// which makes <W, L_minus W> = <S_plus U, S_minus S_plus U> / beta^2 in the
// symmetrized frame.

enum class KreinSign { positive, negative, indeterminate };

struct KreinEstimate {
    KreinSign sign = KreinSign::indeterminate;
    double value = 0.0;
};

inline KreinEstimate krein_sign_estimate(cdouble lambda, const LinearizationPair& lin,
                                         const TadpoleGrid& grid,
                                         StabilityTolerances tol = {}) {
    if (tol.tol_re == 0.0 && tol.tol_im == 0.0 && tol.zero_tol == 0.0)
        tol = default_stability_tolerances(grid);
    if (std::fabs(lambda.real()) > tol.tol_re)
        throw NotImaginary("krein_sign_estimate: eigenvalue has a real part beyond tolerance");
    const double beta = std::fabs(lambda.imag());
    if (beta <= tol.tol_im)
        throw NotImaginary("krein_sign_estimate: eigenvalue is a zero mode");
    const linalg::Matrix P = linalg::matmul(lin.S_minus, lin.S_plus);
    std::vector<double> U = linalg::inverse_iteration(P, beta * beta);
    std::vector<double> SpU = linalg::matvec(lin.S_plus, U);
    std::vector<double> SmSpU = linalg::matvec(lin.S_minus, SpU);
    const double term_u = linalg::dot(U, SpU);
    const double term_w = linalg::dot(SpU, SmSpU) / (beta * beta);
    const double norm2 = linalg::dot(U, U) * (1.0 + linalg::dot(SpU, SpU) / (beta * beta));
    KreinEstimate est;
    est.value = term_u + term_w;
    // indeterminate below the discretization-noise scale of the energy form
    // (same 10 h^2 prefactor convention as the zero-eigenvalue threshold)
    const double floor = 10.0 * grid.h * grid.h * norm2;
    if (std::fabs(est.value) < floor)
        est.sign = KreinSign::indeterminate;
    else
        est.sign = est.value > 0.0 ? KreinSign::positive : KreinSign::negative;
    return est;
}

// ── Sweeps over omega ────────────────────────────────────────────────────────

struct StabilitySample {
    double omega = 0.0;
    bool solved = false;
    std::string failure;
    StabilityReport report;
    double mass = 0.0;
};

struct QuartetTransition {
    double omega_before = 0.0;  // last sample with more quartets
    double omega_after = 0.0;
    int quartets_before = 0;
    int quartets_after = 0;
};

struct StabilitySweep {
    Branch branch;
    std::vector<StabilitySample> samples;
    std::vector<QuartetTransition> transitions;
    // last omega (in sweep order) at which any quartet is present
    std::optional<double> omega_star;
};

// Continuation + stability classification along a descending omega grid.
// Failed samples are recorded and skipped; the sweep continues from the last
// good profile.
inline StabilitySweep sweep_stability(const Branch& branch, const std::vector<double>& omega_grid,
                                      double p, const TadpoleGrid& grid,
                                      const NewtonOptions& opts = {},
                                      StabilityTolerances tol = {}) {
    if (omega_grid.empty()) throw DomainError("sweep_stability: empty omega grid");
    StabilitySweep sweep;
    sweep.branch = branch;
    sweep.samples.reserve(omega_grid.size());

    Seed seed = (branch.kind == BranchKind::vanishing_tail)
                    ? make_vanishing_tail_seed(branch.n, branch.sign, omega_grid.front(), p, grid)
                    : make_seed(branch, std::sqrt(-omega_grid.front()), p, grid);

    for (double omega : omega_grid) {
        StabilitySample sample;
        sample.omega = omega;
        try {
            StationaryWave wave = newton_solve(seed, omega, p, opts);
            seed.phi = wave.profile;
            sample.mass = wave.mass;
            sample.report = stability_spectrum(wave, tol);
            sample.solved = true;
        } catch (const Error& e) {
            sample.failure = e.what();
        }
        sweep.samples.push_back(std::move(sample));
    }

    const StabilitySample* prev = nullptr;
    for (const StabilitySample& s : sweep.samples) {
        if (!s.solved) continue;
        if (s.report.n_quartets > 0) sweep.omega_star = s.omega;
        if (prev && prev->report.n_quartets != s.report.n_quartets) {
            sweep.transitions.push_back(
                {prev->omega, s.omega, prev->report.n_quartets, s.report.n_quartets});
        }
        prev = &s;
    }
    return sweep;
}

}  // namespace tadpole

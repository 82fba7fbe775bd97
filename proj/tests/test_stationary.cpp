#include "doctest.h"

#include <cmath>

#include "tadpole/stationary.hpp"

using namespace tadpole;

TEST_SUITE_BEGIN("stationary");

TEST_CASE("residual of the zero function is zero") {
    TadpoleGrid g = build_grid(M_PI, 2 * M_PI, 100);
    GraphFunction zero(g);
    CHECK(residual(zero, -1.0, 1.0).sup_norm() == 0.0);
}

TEST_CASE("residual of an embedded cn wave is O(h^2) and halves properly") {
    double errs[2];
    int idx = 0;
    for (int nr : {100, 200}) {
        TadpoleGrid g = build_grid(M_PI, 2 * M_PI, nr);
        GraphFunction f = exact_cn_wave(1, +1, -1.0, M_PI, g).embed_zero_tail(g);
        errs[idx++] = residual(f, -1.0, 1.0).sup_norm();
    }
    const double order = std::log2(errs[0] / errs[1]);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
}

TEST_CASE("constant function solves the interior equations when omega = -(p+1)c^{2p}") {
    TadpoleGrid g = build_grid(1.0, 2.0, 16);
    const double c = 0.7, p = 1.0;
    const double omega = -(p + 1.0) * std::pow(c, 2 * p);
    GraphFunction f(g);
    for (double& v : f.values) v = c;
    GraphFunction r = residual(f, omega, p);
    for (int i = 0; i < g.n_unknowns(); ++i) {
        if (i == g.tail_index(g.n_tail - 1)) {
            CHECK(std::fabs(r[i]) > 0.1);  // clamp row feels the Dirichlet truncation
        } else {
            CHECK(std::fabs(r[i]) < 1e-12);
        }
    }
}

TEST_CASE("cn seed converges in <= 3 iterations with the tail exactly zero") {
    TadpoleGrid g = build_grid(M_PI, 2 * M_PI, 100);
    Seed s{exact_cn_wave(1, +1, -1.0, M_PI, g).embed_zero_tail(g), Branch::vanishing_tail(1, +1)};
    StationaryWave w = newton_solve(s, -1.0, 1.0);
    CHECK(w.iterations <= 3);
    CHECK(w.residual_norm < 1e-10);
    CHECK(w.profile.max_abs_tail() < 1e-12);
    CHECK(std::fabs(w.profile.junction()) < 1e-12);
}

TEST_CASE("zero seed is a fixed point") {
    TadpoleGrid g = build_grid(M_PI, 2 * M_PI, 100);
    Seed s{GraphFunction(g), Branch{BranchKind::generic, 1, +1}};
    StationaryWave w = newton_solve(s, -1.0, 1.0);
    CHECK(w.iterations == 0);
    CHECK(w.residual_norm == 0.0);
    CHECK(w.profile.sup_norm() == 0.0);
}

TEST_CASE("primary seed converges with u = eps (1 + O(eps^2)) uniformly") {
    // the O(eps^2) constant carries L^2, so the uniform band is checked at
    // L = 1 and its eps^2 scaling is verified between two amplitudes
    const double L = 1.0;
    double devs[2];
    int idx = 0;
    for (double eps : {0.3, 0.15}) {
        TadpoleGrid g = build_grid_tail_length(L, 100, 14.0 / eps);
        StationaryWave w = newton_solve(make_seed(Branch::primary(), eps, 1.0, g), -eps * eps, 1.0);
        CHECK(w.residual_norm < 1e-10);
        double dev = 0.0;
        for (int j = 0; j <= g.n_ring; ++j)
            dev = std::max(dev, std::fabs(w.profile.ring_value(j) / eps - 1.0));
        devs[idx++] = dev;
    }
    CHECK(devs[0] < 0.1);                 // ~ (eps L)^2 / 2 with margin
    CHECK(devs[1] / devs[0] < 0.4);       // quadratic shrink, ratio ~ 1/4
    CHECK(devs[1] / devs[0] > 0.15);
}

TEST_CASE("sign-flip symmetry: newton_solve(-seed) = -newton_solve(seed)") {
    TadpoleGrid g = build_grid(M_PI, 2 * M_PI, 100);
    Seed splus = make_seed(Branch::higher(1, +1), 0.5, 1.0, g);
    Seed sminus = splus;
    for (double& v : sminus.phi.values) v = -v;
    StationaryWave wp = newton_solve(splus, -0.25, 1.0);
    StationaryWave wm = newton_solve(sminus, -0.25, 1.0);
    double diff = 0.0;
    for (int i = 0; i < g.n_unknowns(); ++i)
        diff = std::max(diff, std::fabs(wp.profile[i] + wm.profile[i]));
    CHECK(diff < 1e-10);
}

TEST_CASE("make_seed: primary seed is Kirchhoff-consistent") {
    TadpoleGrid g = build_grid(M_PI, 2 * M_PI, 100);
    Seed s = make_seed(Branch::primary(), 0.1, 1.0, g);
    CHECK(s.phi.junction() == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(s.phi.ring_value(3) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(s.phi.tail_value(1) ==
          doctest::Approx(0.1 * soliton_phi0(0.1 * g.h, 1.0)).epsilon(1e-13));
}

TEST_CASE("make_seed: higher-branch shift solves u_eps(L+b) = eps and b ~ eps/u'(L)") {
    TadpoleGrid g = build_grid_tail_length(M_PI, 100, 60.0);
    // sign(b) = sign(u'(L)): negative for higher(1,+) under the u'(0) > 0 labels
    Seed s = make_seed(Branch::higher(1, +1), 0.1, 1.0, g);
    CHECK(s.phi.junction() == doctest::Approx(0.1).epsilon(1e-10));
    RingWave ref = exact_cn_wave(1, +1, -0.01, M_PI, g);
    CHECK(ref.derivative_at_L < 0.0);

    // b/eps -> 1/u0'(L) as eps -> 0 (tail scaled with 1/eps)
    for (double eps : {0.1, 0.05}) {
        TadpoleGrid ge = build_grid_tail_length(M_PI, 100, 14.0 / eps);
        Seed se = make_seed(Branch::higher(1, +1), eps, 1.0, ge);
        StationaryWave w = newton_solve(se, -eps * eps, 1.0);
        Shifts sh = extract_shifts(w);
        const double u0pL = exact_cn_wave(1, +1, 0.0, M_PI, ge).derivative_at_L;
        CHECK(sh.b * u0pL / eps == doctest::Approx(1.0).epsilon(0.05));
        CHECK(sh.b < 0.0);
    }
}

TEST_CASE("continuation: primary mass decreases in omega") {
    TadpoleGrid g = build_grid_tail_length(M_PI, 100, 75.0);
    auto branch = continue_branch(Branch::primary(), -0.04, -4.0, 30, 1.0, g);
    REQUIRE(branch.size() == 30);
    for (size_t i = 1; i < branch.size(); ++i) {
        CHECK(branch[i].residual_norm < 1e-10);
        // omega decreases along the branch, mass must increase sample-to-sample
        CHECK(branch[i].mass > branch[i - 1].mass);
    }
}

TEST_CASE("continuation: vanishing-tail branch keeps the tail at zero") {
    TadpoleGrid g = build_grid(M_PI, 2 * M_PI, 100);
    auto branch = continue_branch(Branch::vanishing_tail(1, +1), -0.1, -4.0, 20, 1.0, g);
    for (const StationaryWave& w : branch) CHECK(w.profile.max_abs_tail() < 1e-12);
}

TEST_CASE("higher(1,+) and higher(1,-) carry the same ring and tail masses") {
    TadpoleGrid g = build_grid(M_PI, 2 * M_PI, 100);
    StationaryWave wp = newton_solve(make_seed(Branch::higher(1, +1), 1.0, 1.0, g), -1.0, 1.0);
    StationaryWave wm = newton_solve(make_seed(Branch::higher(1, -1), 1.0, 1.0, g), -1.0, 1.0);
    CHECK(std::fabs(wp.ring_mass - wm.ring_mass) < 1e-8);
    CHECK(std::fabs(wp.tail_mass - wm.tail_mass) < 1e-8);
}

TEST_CASE("junction value of the primary wave converges at second order") {
    std::vector<double> junction;
    for (int nr : {50, 100, 200}) {
        TadpoleGrid g = build_grid_tail_length(M_PI, nr, 30.0);
        Seed s = make_seed(Branch::primary(), 0.4, 1.0, g);
        junction.push_back(newton_solve(s, -0.16, 1.0).profile.junction());
    }
    const double d1 = std::fabs(junction[1] - junction[0]);
    const double d2 = std::fabs(junction[2] - junction[1]);
    CHECK(d1 / d2 > 3.0);  // Richardson ratio ~4 for O(h^2)
    CHECK(d1 / d2 < 5.5);
}

TEST_CASE("flux residual is small at the discretization scale and refines") {
    double flux[2];
    int idx = 0;
    for (int nr : {100, 200}) {
        TadpoleGrid g = build_grid_tail_length(M_PI, nr, 30.0);
        Seed s = make_seed(Branch::primary(), 0.4, 1.0, g);
        StationaryWave w = newton_solve(s, -0.16, 1.0);
        flux[idx++] = std::fabs(w.flux_residual);
        CHECK(std::fabs(w.flux_residual) < g.h * g.h);
    }
    CHECK(flux[0] / flux[1] > 3.0);  // at least second order
}

TEST_CASE("extract_shifts: primary tail shift a tracks 2 L eps") {
    const double L = 1.0;
    double prev_dev = 1e300;
    for (double eps : {0.1, 0.05, 0.025}) {
        TadpoleGrid g = build_grid_tail_length(L, 100, 14.0 / eps);
        StationaryWave w = newton_solve(make_seed(Branch::primary(), eps, 1.0, g), -eps * eps, 1.0);
        Shifts sh = extract_shifts(w);
        const double dev = std::fabs(sh.a / (2 * L * eps) - 1.0);
        CHECK(dev < prev_dev);
        prev_dev = dev;
    }
    CHECK(prev_dev < 0.01);
}

TEST_CASE("primary mass decomposition: ring ~ 2L eps^2, tail ~ eps (1 - tanh a)") {
    const double L = 1.0;
    double prev_ring_dev = 1e300, prev_tail_dev = 1e300;
    for (double eps : {0.1, 0.05}) {
        TadpoleGrid g = build_grid_tail_length(L, 200, 14.0 / eps);
        StationaryWave w = newton_solve(make_seed(Branch::primary(), eps, 1.0, g), -eps * eps, 1.0);
        Shifts sh = extract_shifts(w);
        const double ring_pred = 2.0 * L * eps * eps;
        const double tail_pred = eps * (1.0 - std::tanh(sh.a));  // ||phi0||^2 on (a, inf), p = 1
        const double ring_dev = std::fabs(w.ring_mass / ring_pred - 1.0);
        const double tail_dev = std::fabs(w.tail_mass / tail_pred - 1.0);
        CHECK(ring_dev < prev_ring_dev);
        CHECK(tail_dev < prev_tail_dev);
        prev_ring_dev = ring_dev;
        prev_tail_dev = tail_dev;
    }
    CHECK(prev_ring_dev < 0.02);
    CHECK(prev_tail_dev < 0.02);
}

TEST_CASE("extract_shifts: higher branch has an untranslated tail (a = 0)") {
    TadpoleGrid g = build_grid_tail_length(M_PI, 100, 60.0);
    StationaryWave w = newton_solve(make_seed(Branch::higher(1, +1), 0.1, 1.0, g), -0.01, 1.0);
    Shifts sh = extract_shifts(w);
    CHECK(std::fabs(sh.a) < 1e-6);
}

TEST_CASE("continuation stalls cleanly when pushed into the bifurcation point") {
    // on a truncated grid the branch either survives (residual contract holds
    // throughout) or the continuation aborts with the partial branch attached;
    // it must never return silently broken waves
    TadpoleGrid g = build_grid(M_PI, 2 * M_PI, 100);
    try {
        auto branch = continue_branch(Branch::primary(), -0.09, -1e-7, 10, 1.0, g);
        for (const StationaryWave& w : branch) CHECK(w.residual_norm < 1e-10);
    } catch (const ContinuationStalled& e) {
        CHECK(e.partial.size() < 10);
        for (const StationaryWave& w : e.partial) CHECK(w.residual_norm < 1e-10);
    }
}

TEST_SUITE_END();

#include "doctest.h"

#include <cmath>

#include "tadpole/special_functions.hpp"

using namespace tadpole;

TEST_SUITE_BEGIN("special_functions");

namespace {

// independent quadrature oracle for K(k): adaptive Simpson on the defining
// integral K = int_0^{pi/2} dtheta / sqrt(1 - k^2 sin^2 theta)
double K_quadrature(double k) {
    auto f = [&](double t) { return 1.0 / std::sqrt(1.0 - k * k * std::sin(t) * std::sin(t)); };
    const int n = 1 << 14;  // smooth periodic-ish integrand, plain Simpson is plenty
    const double h = (M_PI / 2.0) / n;
    double s = f(0.0) + f(M_PI / 2.0);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return s * h / 3.0;
}

// centered 4th-order second derivative
template <class F>
double d2_fd4(const F& f, double x, double h) {
    return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) /
           (12.0 * h * h);
}

}  // namespace

TEST_CASE("K(0) = pi/2 and K is strictly increasing") {
    CHECK(complete_K(0.0) == doctest::Approx(M_PI / 2).epsilon(1e-15));
    CHECK(complete_K(0.9) > complete_K(0.5));
    CHECK(complete_K(0.5) > complete_K(0.1));
}

TEST_CASE("K(1/sqrt2) against frozen value and quadrature oracle") {
    const double k = 1.0 / std::sqrt(2.0);
    const double K = complete_K(k);
    CHECK(K == doctest::Approx(1.8540746773).epsilon(1e-10));
    CHECK(K == doctest::Approx(K_quadrature(k)).epsilon(1e-10));
}

TEST_CASE("K rejects moduli outside [0,1)") {
    CHECK_THROWS_AS(complete_K(1.0), DomainError);
    CHECK_THROWS_AS(complete_K(-0.1), DomainError);
    CHECK_THROWS_AS(jacobi_cn(0.5, 1.2), DomainError);
}

TEST_CASE("EllipticModulus enforces the open interval") {
    CHECK_THROWS_AS(EllipticModulus(0.0), DomainError);
    CHECK_THROWS_AS(EllipticModulus(1.0), DomainError);
    EllipticModulus m(0.6);
    CHECK(complete_K(m) == doctest::Approx(complete_K(0.6)).epsilon(1e-15));
    CHECK(jacobi_cn(0.7, m) == doctest::Approx(jacobi_cn(0.7, 0.6)).epsilon(1e-15));
}

TEST_CASE("AGM converges within 10 iterations away from k = 1") {
    for (double k : {0.1, 0.5, 0.9, 0.99, 1.0 - 1e-12})
        CHECK(complete_K_info(k).iterations <= 10);
}

TEST_CASE("cn degenerates to cosine at k = 0") {
    for (double xi : {0.3, 1.0, 2.5})
        CHECK(jacobi_cn(xi, 0.0) == doctest::Approx(std::cos(xi)).epsilon(1e-12));
    CHECK(jacobi_cn(0.0, 0.3) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(jacobi_cn(0.0, 0.9) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("cn satisfies v'' + (1-2k^2) v + 2 k^2 v^3 = 0") {
    const double k = 0.6;
    auto v = [&](double xi) { return jacobi_cn(xi, k); };
    for (double xi : {0.2, 0.9, 1.7, 3.0}) {
        const double res =
            d2_fd4(v, xi, 1e-3) + (1.0 - 2.0 * k * k) * v(xi) + 2.0 * k * k * std::pow(v(xi), 3);
        CHECK(std::fabs(res) < 1e-9);
    }
}

TEST_CASE("cn is 4K-periodic") {
    for (double k : {0.2, 0.6, 0.95}) {
        const double K = complete_K(k);
        for (double xi : {0.0, 0.7, 2.3, 5.1})
            CHECK(std::fabs(jacobi_cn(xi + 4.0 * K, k) - jacobi_cn(xi, k)) < 1e-10);
    }
}

TEST_CASE("soliton normalization phi0(0) = 1") {
    for (double p : {0.5, 1.0, 2.0, 3.0}) {
        CHECK(soliton_phi0(0.0, p) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(soliton_phi0_deriv(0.0, p) == doctest::Approx(0.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS(soliton_phi0(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(soliton_phi0(1.0, -1.0), DomainError);
}

TEST_CASE("phi0(1, 1) = sech(1)") {
    CHECK(soliton_phi0(1.0, 1.0) == doctest::Approx(0.6480542737).epsilon(1e-10));
    CHECK(soliton_phi0(1.0, 1.0) == doctest::Approx(1.0 / std::cosh(1.0)).epsilon(1e-15));
}

TEST_CASE("soliton solves -phi'' + phi - (p+1) phi^{2p+1} = 0") {
    const double p = 1.5;
    auto f = [&](double z) { return soliton_phi0(z, p); };
    for (double z : {0.1, 0.5, 1.3, 2.0}) {
        const double res =
            -d2_fd4(f, z, 1e-3) + f(z) - (p + 1.0) * std::pow(f(z), 2.0 * p + 1.0);
        CHECK(std::fabs(res) < 1e-9);
    }
}

TEST_CASE("soliton decay bound phi0 <= 2^{1/p} e^{-z}") {
    for (double p : {0.5, 1.0, 2.0})
        for (double z = 0.0; z < 12.0; z += 0.37)
            CHECK(soliton_phi0(z, p) <= std::pow(2.0, 1.0 / p) * std::exp(-z) + 1e-15);
}

TEST_CASE("soliton inverse round-trips on z >= 0") {
    for (double p : {0.5, 1.0, 2.0})
        for (double z : {0.0, 0.3, 1.1, 2.7}) {
            const double y = soliton_phi0(z, p);
            CHECK(soliton_phi0_inverse(y, p) == doctest::Approx(z).epsilon(1e-10));
        }
    CHECK_THROWS_AS(soliton_phi0_inverse(1.5, 1.0), OutOfRange);
}

TEST_SUITE_END();

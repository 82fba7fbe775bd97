// special_functions.hpp — complete elliptic integral K(k), Jacobi elliptic
// functions, and the half-line NLS soliton profile.
//
// K(k) is computed by the arithmetic-geometric mean; sn/cn/dn come from the
// same AGM chain via the descending Gauss transformation of the amplitude
// angle (Abramowitz & Stegun 16.4). The soliton is the closed form
//
//     phi0(z) = sech^{1/p}(p z),   -phi0'' + phi0 - (p+1)|phi0|^{2p} phi0 = 0,
//
// with phi0(0) = 1 and phi0'(0) = 0.

#pragma once

#include <cmath>
#include <vector>

#include "tadpole/errors.hpp"

namespace tadpole {

struct AgmResult {
    double K = 0.0;
    int iterations = 0;
};

// K(k) by AGM; relative accuracy near machine epsilon for k <= 1 - 1e-12.
inline AgmResult complete_K_info(double k) {
    if (k < 0.0 || k >= 1.0) throw DomainError("complete_K: modulus must satisfy 0 <= k < 1");
    double a = 1.0;
    double b = std::sqrt(1.0 - k * k);
    int it = 0;
    while (std::fabs(a - b) > 1e-16 * a && it < 40) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
        ++it;
    }
    return {M_PI / (2.0 * a), it};
}

inline double complete_K(double k) { return complete_K_info(k).K; }

// Dimensionless modulus, strictly inside (0, 1); the k = 0 and k = 1 limits
// are handled as analytic limits by callers.
struct EllipticModulus {
    double k;
    explicit EllipticModulus(double modulus) : k(modulus) {
        if (!(k > 0.0) || !(k < 1.0))
            throw DomainError("EllipticModulus: modulus must lie strictly inside (0, 1)");
    }
};

inline double complete_K(EllipticModulus m) { return complete_K(m.k); }

struct JacobiTriple {
    double sn, cn, dn;
};

// sn/cn/dn at argument u for modulus k in [0, 1). The AGM scale factors are
// stored on the way up and the amplitude angle is recovered on the way down.
inline JacobiTriple jacobi_sn_cn_dn(double u, double k) {
    if (k < 0.0 || k >= 1.0) throw DomainError("jacobi_sn_cn_dn: modulus must satisfy 0 <= k < 1");
    if (!std::isfinite(u)) throw DomainError("jacobi_sn_cn_dn: non-finite argument");
    if (k < 1e-14) return {std::sin(u), std::cos(u), 1.0};

    double a[40], c[40];
    double an = 1.0, bn = std::sqrt(1.0 - k * k), cn_ = k;
    int n = 0;
    a[0] = an;
    c[0] = cn_;
    while (std::fabs(cn_) > 1e-16 * an && n < 39) {
        const double a1 = 0.5 * (an + bn);
        cn_ = 0.5 * (an - bn);
        bn = std::sqrt(an * bn);
        an = a1;
        ++n;
        a[n] = an;
        c[n] = cn_;
    }
    double phi = std::ldexp(1.0, n) * an * u;
    for (int m = n; m >= 1; --m) {
        double s = c[m] * std::sin(phi) / a[m];
        s = std::max(-1.0, std::min(1.0, s));
        phi = 0.5 * (phi + std::asin(s));
    }
    const double sn = std::sin(phi);
    const double cn = std::cos(phi);
    const double dn = std::sqrt(std::max(0.0, 1.0 - k * k * sn * sn));
    return {sn, cn, dn};
}

inline double jacobi_cn(double u, double k) { return jacobi_sn_cn_dn(u, k).cn; }

inline JacobiTriple jacobi_sn_cn_dn(double u, EllipticModulus m) {
    return jacobi_sn_cn_dn(u, m.k);
}
inline double jacobi_cn(double u, EllipticModulus m) { return jacobi_cn(u, m.k); }

// phi0(z) = sech^{1/p}(pz); valid for all finite z, p > 0.
inline double soliton_phi0(double z, double p) {
    if (!(p > 0.0)) throw DomainError("soliton_phi0: power must be positive");
    return std::pow(1.0 / std::cosh(p * z), 1.0 / p);
}

// phi0'(z) = -sech^{1/p}(pz) tanh(pz)
inline double soliton_phi0_deriv(double z, double p) {
    if (!(p > 0.0)) throw DomainError("soliton_phi0_deriv: power must be positive");
    return -soliton_phi0(z, p) * std::tanh(p * z);
}

// Monotone inverse on z >= 0: returns z with phi0(z) = y for y in (0, 1].
inline double soliton_phi0_inverse(double y, double p) {
    if (!(p > 0.0)) throw DomainError("soliton_phi0_inverse: power must be positive");
    if (!(y > 0.0) || y > 1.0) throw OutOfRange("soliton_phi0_inverse: value outside (0, 1]");
    // sech(pz) = y^p  =>  pz = acosh(y^{-p})
    const double arg = std::pow(y, -p);
    return std::acosh(std::max(1.0, arg)) / p;
}

}  // namespace tadpole

// linalg.hpp — dense linear algebra kernels used by the tadpole toolkit.
//
// Everything here is deliberately self-contained: LU with partial pivoting,
// a pivoted tridiagonal factorization (LAPACK dgttrf layout), a bordered
// tridiagonal solve for the junction-arrow Jacobians, Householder
// tridiagonalization with implicit-shift QL for symmetric eigenproblems,
// and balance + Hessenberg reduction + Francis double-shift QR for the
// nonsymmetric spectra. The eigensolvers follow the classic EISPACK
// formulations (tred2/tql2, balanc/elmhes/hqr) in 0-based form.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "tadpole/errors.hpp"

namespace tadpole::linalg {

using cdouble = std::complex<double>;

struct Matrix {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Matrix matmul(const Matrix& x, const Matrix& y) {
    Matrix z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const double xik = x(i, k);
            if (xik == 0.0) continue;
            for (int j = 0; j < y.cols; ++j) z(i, j) += xik * y(k, j);
        }
    return z;
}

inline std::vector<double> matvec(const Matrix& m, const std::vector<double>& v) {
    std::vector<double> r(m.rows, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols; ++j) s += m(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(const std::vector<double>& x) { return std::sqrt(dot(x, x)); }

inline double sup_norm(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s = std::max(s, std::fabs(v));
    return s;
}

inline double pythag(double a, double b) {
    double absa = std::fabs(a), absb = std::fabs(b);
    if (absa > absb) {
        double r = absb / absa;
        return absa * std::sqrt(1.0 + r * r);
    }
    if (absb == 0.0) return 0.0;
    double r = absa / absb;
    return absb * std::sqrt(1.0 + r * r);
}

// ── Dense LU with partial pivoting ───────────────────────────────────────────

struct LuFactors {
    Matrix lu;
    std::vector<int> piv;
};

inline LuFactors lu_factor(Matrix m) {
    const int n = m.rows;
    LuFactors f{std::move(m), std::vector<int>(n)};
    Matrix& a = f.lu;
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::fabs(a(k, k));
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(a(i, k)) > best) { best = std::fabs(a(i, k)); p = i; }
        f.piv[k] = p;
        if (best == 0.0) throw SingularJacobian("lu_factor: exact zero pivot");
        if (p != k)
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
        const double inv = 1.0 / a(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double m_ik = a(i, k) * inv;
            a(i, k) = m_ik;
            if (m_ik == 0.0) continue;
            for (int j = k + 1; j < n; ++j) a(i, j) -= m_ik * a(k, j);
        }
    }
    return f;
}

inline std::vector<double> lu_solve(const LuFactors& f, std::vector<double> b) {
    const int n = f.lu.rows;
    // rows of the factors are stored fully swapped, so all interchanges apply
    // to the right-hand side before the triangular solves
    for (int k = 0; k < n; ++k)
        if (f.piv[k] != k) std::swap(b[k], b[f.piv[k]]);
    for (int k = 0; k < n; ++k)
        for (int i = k + 1; i < n; ++i) b[i] -= f.lu(i, k) * b[k];
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= f.lu(i, j) * b[j];
        b[i] = s / f.lu(i, i);
    }
    return b;
}

// ── Pivoted tridiagonal factorization (dgttrf/dgtts2 layout) ─────────────────

struct TridiagFactors {
    int n = 0;
    std::vector<double> dl, d, du, du2;
    std::vector<int> piv;
};

inline TridiagFactors tridiag_factor(std::vector<double> sub, std::vector<double> diag,
                                     std::vector<double> sup) {
    const int n = static_cast<int>(diag.size());
    TridiagFactors f;
    f.n = n;
    f.dl = std::move(sub);
    f.d = std::move(diag);
    f.du = std::move(sup);
    f.du2.assign(n > 2 ? n - 2 : 0, 0.0);
    f.piv.assign(n, 0);
    for (int i = 0; i < n; ++i) f.piv[i] = i;
    for (int i = 0; i + 1 < n; ++i) {
        if (std::fabs(f.d[i]) >= std::fabs(f.dl[i])) {
            if (f.d[i] == 0.0) throw SingularJacobian("tridiag_factor: zero pivot");
            const double fact = f.dl[i] / f.d[i];
            f.dl[i] = fact;
            f.d[i + 1] -= fact * f.du[i];
            if (i + 2 < n) f.du2[i] = 0.0;
        } else {
            const double fact = f.d[i] / f.dl[i];
            f.d[i] = f.dl[i];
            f.dl[i] = fact;
            const double tmp = f.du[i];
            f.du[i] = f.d[i + 1];
            f.d[i + 1] = tmp - fact * f.d[i + 1];
            if (i + 2 < n) {
                f.du2[i] = f.du[i + 1];
                f.du[i + 1] = -fact * f.du[i + 1];
            }
            f.piv[i] = i + 1;
        }
    }
    if (f.d[n - 1] == 0.0) throw SingularJacobian("tridiag_factor: zero last pivot");
    return f;
}

inline std::vector<double> tridiag_solve(const TridiagFactors& f, std::vector<double> b) {
    const int n = f.n;
    for (int i = 0; i + 1 < n; ++i) {
        if (f.piv[i] == i) {
            b[i + 1] -= f.dl[i] * b[i];
        } else {
            const double tmp = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tmp - f.dl[i] * b[i];
        }
    }
    b[n - 1] /= f.d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - f.du[n - 2] * b[n - 1]) / f.d[n - 2];
    for (int i = n - 3; i >= 0; --i)
        b[i] = (b[i] - f.du[i] * b[i + 1] - f.du2[i] * b[i + 2]) / f.d[i];
    return b;
}

// Bordered system [T c; r^T corner] [x; w] = rhs, solved by a Schur complement
// on the single border unknown. T is the factored tridiagonal block.
inline std::vector<double> bordered_tridiag_solve(const TridiagFactors& T,
                                                  const std::vector<double>& border_col,
                                                  const std::vector<double>& border_row,
                                                  double corner, const std::vector<double>& rhs) {
    const int n = T.n;
    std::vector<double> f(rhs.begin(), rhs.begin() + n);
    const double g = rhs[n];
    std::vector<double> x1 = tridiag_solve(T, f);
    std::vector<double> x2 = tridiag_solve(T, border_col);
    const double denom = corner - dot(border_row, x2);
    const double scale = std::fabs(corner) + sup_norm(border_row) * sup_norm(x2) + 1.0;
    if (std::fabs(denom) < 1e-14 * scale)
        throw SingularJacobian("bordered_tridiag_solve: singular Schur complement");
    const double w = (g - dot(border_row, x1)) / denom;
    std::vector<double> x(n + 1);
    for (int i = 0; i < n; ++i) x[i] = x1[i] - w * x2[i];
    x[n] = w;
    return x;
}

// ── Symmetric eigensolver: Householder tridiagonalization + implicit QL ──────

// Reduces the symmetric matrix stored in z to tridiagonal form (d = diagonal,
// e = subdiagonal with e[0] = 0). With accumulate = true, z is overwritten by
// the orthogonal transformation matrix so QL can rotate eigenvectors into it.
inline void householder_tridiag(Matrix& z, std::vector<double>& d, std::vector<double>& e,
                                bool accumulate) {
    const int n = z.rows;
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    for (int i = n - 1; i > 0; --i) {
        const int l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::fabs(z(i, k));
            if (scale == 0.0) {
                e[i] = z(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                double f = z(i, l);
                double g = (f >= 0.0 ? -std::sqrt(h) : std::sqrt(h));
                e[i] = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    if (accumulate) z(j, i) = z(i, j) / h;
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
                    for (int k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
                    e[j] = g / h;
                    f += e[j] * z(i, j);
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = z(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
                }
            }
        } else {
            e[i] = z(i, l);
        }
        d[i] = h;
    }
    if (accumulate) d[0] = 0.0;
    e[0] = 0.0;
    for (int i = 0; i < n; ++i) {
        if (accumulate) {
            if (d[i] != 0.0) {
                for (int j = 0; j < i; ++j) {
                    double g = 0.0;
                    for (int k = 0; k < i; ++k) g += z(i, k) * z(k, j);
                    for (int k = 0; k < i; ++k) z(k, j) -= g * z(k, i);
                }
            }
            d[i] = z(i, i);
            z(i, i) = 1.0;
            for (int j = 0; j < i; ++j) z(j, i) = z(i, j) = 0.0;
        } else {
            d[i] = z(i, i);
        }
    }
}

// Implicit-shift QL on a tridiagonal matrix. If z is non-null its columns are
// rotated along, producing eigenvectors of the original matrix.
inline void ql_implicit_shift(std::vector<double>& d, std::vector<double>& e, Matrix* z) {
    const int n = static_cast<int>(d.size());
    const double eps = std::numeric_limits<double>::epsilon();
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == 50) throw QRNoConvergence("ql_implicit_shift: too many iterations");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = pythag(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i = m - 1;
                for (; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    e[i + 1] = (r = pythag(f, g));
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    d[i + 1] = g + (p = s * r);
                    g = c * r - b;
                    if (z) {
                        for (int k = 0; k < n; ++k) {
                            f = (*z)(k, i + 1);
                            (*z)(k, i + 1) = s * (*z)(k, i) + c * f;
                            (*z)(k, i) = c * (*z)(k, i) - s * f;
                        }
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

struct SymEigResult {
    std::vector<double> values;  // ascending
    Matrix vectors;              // columns match values; empty unless requested
};

inline SymEigResult sym_eig(Matrix a, bool want_vectors = true) {
    const int n = a.rows;
    std::vector<double> d, e;
    householder_tridiag(a, d, e, want_vectors);
    ql_implicit_shift(d, e, want_vectors ? &a : nullptr);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) { return d[i] < d[j]; });
    SymEigResult r;
    r.values.resize(n);
    if (want_vectors) r.vectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        r.values[j] = d[order[j]];
        if (want_vectors)
            for (int i = 0; i < n; ++i) r.vectors(i, j) = a(i, order[j]);
    }
    return r;
}

// Eigenvalues of a symmetric tridiagonal matrix; sub[i] couples rows i and i+1.
inline std::vector<double> tridiag_eigenvalues(std::vector<double> diag,
                                               const std::vector<double>& sub) {
    const int n = static_cast<int>(diag.size());
    std::vector<double> e(n, 0.0);
    for (int i = 1; i < n; ++i) e[i] = sub[i - 1];
    ql_implicit_shift(diag, e, nullptr);
    std::sort(diag.begin(), diag.end());
    return diag;
}

// ── Nonsymmetric eigenvalues: balance + elmhes + Francis double-shift QR ─────

inline void balance_in_place(Matrix& a) {
    const int n = a.rows;
    const double radix = 2.0, sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (int i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) {
                    c += std::fabs(a(j, i));
                    r += std::fabs(a(i, j));
                }
            if (c != 0.0 && r != 0.0) {
                double g = r / radix, f = 1.0;
                const double s = c + r;
                while (c < g) {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while (c > g) {
                    f /= radix;
                    c /= sqrdx;
                }
                if ((c + r) / f < 0.95 * s) {
                    done = false;
                    g = 1.0 / f;
                    for (int j = 0; j < n; ++j) a(i, j) *= g;
                    for (int j = 0; j < n; ++j) a(j, i) *= f;
                }
            }
        }
    }
}

// Reduction to upper Hessenberg form by stabilized elimination.
inline void hessenberg_reduce(Matrix& a) {
    const int n = a.rows;
    for (int m = 1; m < n - 1; ++m) {
        double x = 0.0;
        int pivot = m;
        for (int j = m; j < n; ++j)
            if (std::fabs(a(j, m - 1)) > std::fabs(x)) {
                x = a(j, m - 1);
                pivot = j;
            }
        if (pivot != m) {
            for (int j = m - 1; j < n; ++j) std::swap(a(pivot, j), a(m, j));
            for (int j = 0; j < n; ++j) std::swap(a(j, pivot), a(j, m));
        }
        if (x != 0.0) {
            for (int i = m + 1; i < n; ++i) {
                double y = a(i, m - 1);
                if (y != 0.0) {
                    y /= x;
                    a(i, m - 1) = y;
                    for (int j = m; j < n; ++j) a(i, j) -= y * a(m, j);
                    for (int j = 0; j < n; ++j) a(j, m) += y * a(j, i);
                }
            }
        }
    }
    for (int i = 2; i < n; ++i)
        for (int j = 0; j < i - 1; ++j) a(i, j) = 0.0;
}

// Iteration-cap failure carrying whatever eigenvalues had already deflated.
struct QRPartial : QRNoConvergence {
    std::vector<cdouble> partial;
    QRPartial(const std::string& what, std::vector<cdouble> p)
        : QRNoConvergence(what), partial(std::move(p)) {}
};

// Francis double-shift QR on an upper Hessenberg matrix. Eigenvalues only.
inline std::vector<cdouble> hessenberg_qr_eigenvalues(Matrix& a) {
    const int n = a.rows;
    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<cdouble> wri(n);
    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::fabs(a(i, j));
    if (anorm == 0.0) return wri;
    int nn = n - 1;
    double t = 0.0;
    double p = 0.0, q = 0.0, r = 0.0, x, y, z = 0.0, w, s, u, v;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l > 0; --l) {
                s = std::fabs(a(l - 1, l - 1)) + std::fabs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::fabs(a(l, l - 1)) <= eps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            x = a(nn, nn);
            if (l == nn) {
                wri[nn--] = x + t;
            } else {
                y = a(nn - 1, nn - 1);
                w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = std::sqrt(std::fabs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + std::copysign(z, p);
                        wri[nn - 1] = wri[nn] = x + z;
                        if (z != 0.0) wri[nn] = x - w / z;
                    } else {
                        wri[nn] = cdouble(x + p, -z);
                        wri[nn - 1] = std::conj(wri[nn]);
                    }
                    nn -= 2;
                } else {
                    if (its == 60)
                        throw QRPartial("hessenberg_qr: too many iterations",
                                        std::vector<cdouble>(wri.begin() + nn + 1, wri.end()));
                    if (its == 10 || its == 20 || its == 30 || its == 40 || its == 50) {
                        t += x;
                        for (int i = 0; i < nn + 1; ++i) a(i, i) -= x;
                        s = std::fabs(a(nn, nn - 1)) + std::fabs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::fabs(p) + std::fabs(q) + std::fabs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        u = std::fabs(a(m, m - 1)) * (std::fabs(q) + std::fabs(r));
                        v = std::fabs(p) *
                            (std::fabs(a(m - 1, m - 1)) + std::fabs(z) + std::fabs(a(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m; i < nn - 1; ++i) {
                        a(i + 2, i) = 0.0;
                        if (i != m) a(i + 2, i - 1) = 0.0;
                    }
                    for (int k = m; k < nn; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k + 1 != nn) r = a(k + 2, k - 1);
                            if ((x = std::fabs(p) + std::fabs(q) + std::fabs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        if ((s = std::copysign(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
                            if (k == m) {
                                if (l != m) a(k, k - 1) = -a(k, k - 1);
                            } else {
                                a(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j < nn + 1; ++j) {
                                p = a(k, j) + q * a(k + 1, j);
                                if (k + 1 != nn) {
                                    p += r * a(k + 2, j);
                                    a(k + 2, j) -= p * z;
                                }
                                a(k + 1, j) -= p * y;
                                a(k, j) -= p * x;
                            }
                            const int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i < mmin + 1; ++i) {
                                p = x * a(i, k) + y * a(i, k + 1);
                                if (k + 1 != nn) {
                                    p += z * a(i, k + 2);
                                    a(i, k + 2) -= p * r;
                                }
                                a(i, k + 1) -= p * q;
                                a(i, k) -= p;
                            }
                        }
                    }
                }
            }
        } while (l + 1 < nn);
    }
    return wri;
}

inline std::vector<cdouble> nonsym_eigenvalues(Matrix a) {
    if (a.rows == 0) return {};
    if (a.rows == 1) return {cdouble(a(0, 0), 0.0)};
    balance_in_place(a);
    hessenberg_reduce(a);
    return hessenberg_qr_eigenvalues(a);
}

// Inverse iteration for a real eigenvector of an isolated real eigenvalue.
inline std::vector<double> inverse_iteration(const Matrix& a, double eigenvalue, int iters = 6) {
    const int n = a.rows;
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::fabs(a(i, j)));
    Matrix shifted = a;
    const double offset = 1e-10 * (scale + std::fabs(eigenvalue) + 1.0);
    for (int i = 0; i < n; ++i) shifted(i, i) -= eigenvalue + offset;
    LuFactors f = lu_factor(std::move(shifted));
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.37 * std::sin(1.0 + i);  // deterministic start
    double nv = norm2(v);
    for (double& x : v) x /= nv;
    for (int it = 0; it < iters; ++it) {
        v = lu_solve(f, std::move(v));
        nv = norm2(v);
        if (!(nv > 0.0) || !std::isfinite(nv)) throw Error("inverse_iteration: breakdown");
        for (double& x : v) x /= nv;
    }
    return v;
}

}  // namespace tadpole::linalg

// graph.hpp — discrete tadpole graph: a ring [-L, L] glued to a truncated
// half-line [L, L_inf] at a single Kirchhoff vertex.
//
// Unknown ordering: [ring interior u_1..u_{n_ring-1}, junction value w,
// tail interior v_1..v_{n_tail-1}]. The junction value is stored once, so
// continuity u(L) = u(-L) = v(L) holds by construction; the tail endpoint is
// clamped to zero (Dirichlet truncation of the half-line).
//
// The second-difference Laplacian uses the central stencil at interior nodes
// and the degree-3 vertex stencil
//
//     (-Delta psi)_w = (2 / 3h^2) (3w - a - b - c),
//
// where a, b, c are the three grid neighbours of the vertex. Summing the
// three one-sided Taylor expansions cancels the first-derivative terms by
// the flux condition u'(L) - u'(-L) = v'(L), and because psi'' is continuous
// across the vertex for solutions of the differential equation, the stencil
// is second-order consistent there. With the lumped weights (h at interior
// nodes, 3h/2 at the vertex) the operator is symmetrizable:
// W^{1/2} A W^{-1/2} is symmetric and positive semi-definite.

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "tadpole/errors.hpp"
#include "tadpole/linalg.hpp"

namespace tadpole {

struct TadpoleGrid {
    double L = 0.0;       // ring half-length; ring occupies [-L, L]
    double L_inf = 0.0;   // tail truncation coordinate
    double h = 0.0;       // uniform spacing on both segments
    int n_ring = 0;       // subintervals on [-L, L]
    int n_tail = 0;       // subintervals on [L, L_inf]

    int n_unknowns() const { return n_ring + n_tail - 1; }
    int junction_index() const { return n_ring - 1; }
    int ring_index(int j) const { return j - 1; }            // j = 1..n_ring-1
    int tail_index(int i) const { return n_ring - 1 + i; }   // i = 1..n_tail-1
    double ring_x(int j) const { return -L + j * h; }        // j = 0..n_ring
    double tail_x(int i) const { return L + i * h; }         // i = 0..n_tail
};

inline TadpoleGrid build_grid(double L, double L_inf, int n_ring) {
    if (!(L > 0.0) || !(L_inf > L))
        throw InvalidGeometry("build_grid: require L > 0 and L_inf > L");
    if (n_ring < 8 || n_ring % 2 != 0)
        throw InvalidGeometry("build_grid: n_ring must be even and >= 8");
    TadpoleGrid g;
    g.L = L;
    g.L_inf = L_inf;
    g.n_ring = n_ring;
    g.h = 2.0 * L / n_ring;
    const double cells = (L_inf - L) / g.h;
    const double rounded = std::round(cells);
    if (std::fabs(cells - rounded) > 1e-9 * std::max(1.0, cells))
        throw NonCommensurateTail("build_grid: (L_inf - L) is not an integer multiple of h");
    g.n_tail = static_cast<int>(rounded);
    if (g.n_tail < 4) throw InvalidGeometry("build_grid: n_tail must be >= 4");
    return g;
}

// Convenience: choose the tail length as the nearest commensurate value to
// the requested one. Used when the tail only has to be "long enough".
inline TadpoleGrid build_grid_tail_length(double L, int n_ring, double tail_length) {
    const double h = 2.0 * L / n_ring;
    const int cells = std::max(4, static_cast<int>(std::round(tail_length / h)));
    return build_grid(L, L + cells * h, n_ring);
}

// Values on the graph in the grid's unknown ordering. Kirchhoff continuity
// holds by construction because the junction value is stored once.
struct GraphFunction {
    const TadpoleGrid* grid = nullptr;
    std::vector<double> values;

    GraphFunction() = default;
    explicit GraphFunction(const TadpoleGrid& g) : grid(&g), values(g.n_unknowns(), 0.0) {}

    double& operator[](int i) { return values[i]; }
    double operator[](int i) const { return values[i]; }
    int size() const { return static_cast<int>(values.size()); }

    double junction() const { return values[grid->junction_index()]; }
    double& junction() { return values[grid->junction_index()]; }

    // Ring value at node j = 0..n_ring (both ends resolve to the junction).
    double ring_value(int j) const {
        if (j <= 0 || j >= grid->n_ring) return junction();
        return values[grid->ring_index(j)];
    }
    // Tail value at node i = 0..n_tail (clamped end included).
    double tail_value(int i) const {
        if (i <= 0) return junction();
        if (i >= grid->n_tail) return 0.0;
        return values[grid->tail_index(i)];
    }

    double sup_norm() const { return linalg::sup_norm(values); }
    double max_abs_tail() const {
        double m = 0.0;
        for (int i = 1; i < grid->n_tail; ++i) m = std::max(m, std::fabs(tail_value(i)));
        return m;
    }
};

// Sample u on the ring and v on the tail; enforces u(L) = v(L) by storing the
// ring value at the vertex (caller should pass compatible functions).
inline GraphFunction sample_graph_function(const TadpoleGrid& g,
                                           const std::function<double(double)>& ring_fn,
                                           const std::function<double(double)>& tail_fn) {
    GraphFunction f(g);
    for (int j = 1; j < g.n_ring; ++j) f[g.ring_index(j)] = ring_fn(g.ring_x(j));
    f.junction() = ring_fn(g.L);
    for (int i = 1; i < g.n_tail; ++i) f[g.tail_index(i)] = tail_fn(g.tail_x(i));
    return f;
}

// Applies the assembled -Delta to a value vector in unknown ordering. O(N).
inline std::vector<double> apply_neg_laplacian(const TadpoleGrid& g,
                                               const std::vector<double>& u) {
    const int N = g.n_unknowns();
    const int jw = g.junction_index();
    const double ih2 = 1.0 / (g.h * g.h);
    std::vector<double> r(N, 0.0);
    const double w = u[jw];
    // ring interior
    for (int j = 1; j < g.n_ring; ++j) {
        const double left = (j == 1) ? w : u[g.ring_index(j - 1)];
        const double right = (j == g.n_ring - 1) ? w : u[g.ring_index(j + 1)];
        r[g.ring_index(j)] = (-left + 2.0 * u[g.ring_index(j)] - right) * ih2;
    }
    // junction: ring neighbour of +L, ring neighbour of -L, first tail node
    const double a = u[g.ring_index(g.n_ring - 1)];
    const double b = u[g.ring_index(1)];
    const double c = u[g.tail_index(1)];
    r[jw] = (2.0 / 3.0) * ih2 * (3.0 * w - a - b - c);
    // tail interior, Dirichlet clamp past the last unknown
    for (int i = 1; i < g.n_tail; ++i) {
        const double left = (i == 1) ? w : u[g.tail_index(i - 1)];
        const double right = (i == g.n_tail - 1) ? 0.0 : u[g.tail_index(i + 1)];
        r[g.tail_index(i)] = (-left + 2.0 * u[g.tail_index(i)] - right) * ih2;
    }
    return r;
}

// Dense matrix of -Delta in unknown ordering.
inline linalg::Matrix assemble_laplacian(const TadpoleGrid& g) {
    const int N = g.n_unknowns();
    const int jw = g.junction_index();
    const double ih2 = 1.0 / (g.h * g.h);
    linalg::Matrix A(N, N);
    for (int j = 1; j < g.n_ring; ++j) {
        const int row = g.ring_index(j);
        A(row, row) = 2.0 * ih2;
        const int left = (j == 1) ? jw : g.ring_index(j - 1);
        const int right = (j == g.n_ring - 1) ? jw : g.ring_index(j + 1);
        A(row, left) -= ih2;
        A(row, right) -= ih2;
    }
    A(jw, jw) = 2.0 * ih2;
    A(jw, g.ring_index(g.n_ring - 1)) -= (2.0 / 3.0) * ih2;
    A(jw, g.ring_index(1)) -= (2.0 / 3.0) * ih2;
    A(jw, g.tail_index(1)) -= (2.0 / 3.0) * ih2;
    for (int i = 1; i < g.n_tail; ++i) {
        const int row = g.tail_index(i);
        A(row, row) = 2.0 * ih2;
        A(row, (i == 1) ? jw : g.tail_index(i - 1)) -= ih2;
        if (i != g.n_tail - 1) A(row, g.tail_index(i + 1)) -= ih2;
    }
    return A;
}

// Lumped L^2 weights: h at interior nodes, 3h/2 at the vertex (three half
// cells). <f, g> = sum w_i f_i g_i is a second-order quadrature of the
// L^2(-L,L) x L^2(L,inf) inner product.
inline std::vector<double> mass_weights(const TadpoleGrid& g) {
    std::vector<double> w(g.n_unknowns(), g.h);
    w[g.junction_index()] = 1.5 * g.h;
    return w;
}

inline double weighted_dot(const std::vector<double>& w, const std::vector<double>& f,
                           const std::vector<double>& g) {
    double s = 0.0;
    for (size_t i = 0; i < w.size(); ++i) s += w[i] * f[i] * g[i];
    return s;
}

// S = W^{1/2} A W^{-1/2}; throws if the result is not symmetric to tolerance.
inline linalg::Matrix symmetrize(const linalg::Matrix& A, const std::vector<double>& w,
                                 double tol = 1e-10) {
    const int n = A.rows;
    std::vector<double> sq(n);
    for (int i = 0; i < n; ++i) sq[i] = std::sqrt(w[i]);
    linalg::Matrix S(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) S(i, j) = sq[i] * A(i, j) / sq[j];
    double asym = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            asym = std::max(asym, std::fabs(S(i, j) - S(j, i)));
            scale = std::max(scale, std::fabs(S(i, j)));
        }
    if (asym > tol * std::max(1.0, scale))
        throw NonSymmetrizable("symmetrize: asymmetry " + std::to_string(asym));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = 0.5 * (S(i, j) + S(j, i));
            S(i, j) = S(j, i) = v;
        }
    return S;
}

}  // namespace tadpole

#pragma once

// Uniform radial grid on [0, L] for dimension N in {1, 2}, with finite-volume
// cell weights that include the surface factor |S^{N-1}| r^{N-1}, so that
//   sum_i vol[i] * f(r_i)  ~  integral over R^N of f(|y|) dy
// for radial f supported in the ball of radius L.  Cell volumes are exact
// (vol[i] = |B eval at cell edges|), hence sum(vol) == |B_L| to rounding.
// The same weights make the finite-volume radial Laplacian self-adjoint in
// the induced inner product.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "hotspot/errors.hpp"

namespace hotspot {

struct RadialGrid {
    int dim = 1;                // N in {1, 2}
    int n = 0;                  // number of intervals; nodes 0..n
    double length = 0.0;        // truncation radius L
    double h = 0.0;             // node spacing L/n
    std::vector<double> r;      // node positions, size n+1
    std::vector<double> vol;    // cell volumes, size n+1
    std::vector<double> face;   // |S^{N-1}| r_{i+1/2}^{N-1} / h for faces (i,i+1), size n

    static RadialGrid make(int dim, int n, double length) {
        if (dim != 1 && dim != 2)
            throw dimension_error("RadialGrid: dimension must be 1 or 2, got " + std::to_string(dim));
        if (n < 2)
            throw grid_error("RadialGrid: need at least 2 intervals, got " + std::to_string(n));
        if (!(length > 0.0))
            throw grid_error("RadialGrid: truncation radius must be positive");

        RadialGrid g;
        g.dim = dim;
        g.n = n;
        g.length = length;
        g.h = length / n;
        g.r.resize(n + 1);
        g.vol.resize(n + 1);
        g.face.resize(n);
        const double surf = (dim == 1) ? 2.0 : 2.0 * std::numbers::pi;
        auto ball = [dim](double rad) {
            return (dim == 1) ? 2.0 * rad : std::numbers::pi * rad * rad;
        };
        for (int i = 0; i <= n; ++i) {
            g.r[i] = i * g.h;
            const double lo = std::max(g.r[i] - 0.5 * g.h, 0.0);
            const double hi = std::min(g.r[i] + 0.5 * g.h, length);
            g.vol[i] = ball(hi) - ball(lo);
        }
        for (int i = 0; i < n; ++i) {
            const double rf = 0.5 * (g.r[i] + g.r[i + 1]);
            g.face[i] = surf * std::pow(rf, dim - 1) / g.h;
        }
        return g;
    }

    // |B_L|, i.e. 2L (N=1) or pi L^2 (N=2)
    double ball_volume() const {
        return (dim == 1) ? 2.0 * length : std::numbers::pi * length * length;
    }

    bool same_as(const RadialGrid& o) const {
        return dim == o.dim && n == o.n && length == o.length;
    }
};

inline double integrate(const RadialGrid& g, std::span<const double> f) {
    if (f.size() != g.vol.size())
        throw grid_error("integrate: grid function has wrong size");
    double s = 0.0;
    for (size_t i = 0; i < f.size(); ++i) s += g.vol[i] * f[i];
    return s;
}

// weighted inner product <f, g> = sum vol f g
inline double inner(const RadialGrid& g, std::span<const double> a, std::span<const double> b) {
    if (a.size() != g.vol.size() || b.size() != g.vol.size())
        throw grid_error("inner: grid function has wrong size");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += g.vol[i] * a[i] * b[i];
    return s;
}

} // namespace hotspot

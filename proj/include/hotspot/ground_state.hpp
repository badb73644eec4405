#pragma once

// Radial ground state of  Delta w - w + w^3 = 0  in R^N, N in {1,2}:
// closed form sqrt(2) sech(y) in 1D, shooting + finite-difference polish for
// the 2D Townes-type profile.  Also the moment integrals and the identity
// suite the rest of the code consumes:
//   int w^4 = 4/(4-N) int w^2,   int |grad w|^2 = N/(4-N) int w^2,
//   int w = int w^3,             int w w0 = (1/2 - N/4) int w^2,
// with w0 = (w + y.grad w)/2.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "hotspot/errors.hpp"
#include "hotspot/radial_grid.hpp"
#include "hotspot/tridiag.hpp"

namespace hotspot {

struct Moments {
    double m1 = 0.0;     // int w
    double m2 = 0.0;     // int w^2
    double m3 = 0.0;     // int w^3
    double m4 = 0.0;     // int w^4
    double g2 = 0.0;     // int |grad w|^2
    double y2 = std::numeric_limits<double>::quiet_NaN();   // int y^2 w_y^2 (N=1 only)
    double c0 = std::numeric_limits<double>::quiet_NaN();   // m2 / (2 int w0^2) (N=2 only)
    double ww0 = 0.0;    // int w w0
    double w3w0 = 0.0;   // int w^3 w0
    double w0sq = 0.0;   // int w0^2
};

struct GroundState {
    RadialGrid grid;
    std::vector<double> w;    // profile values, size n+1
    std::vector<double> dw;   // radial derivative
    std::vector<double> w0;   // (w + r dw)/2
    Moments mom;
    double ode_residual = 0.0;      // max-norm residual of the radial ODE
    double shoot_amplitude = 0.0;   // w(0) found by the shooting bisection (N=2)
};

namespace detail {

// RK4 trajectory of w'' + (N-1)/r w' = w - w^3, w'(0)=0, w(0)=a, on the grid.
// Stops early when the solution crosses zero or turns back up; returns the
// stop index (== n when the whole trajectory stayed admissible).
enum class ShotEnd { crossed, diverged, reached_end };

struct ShotResult {
    std::vector<double> w;
    std::vector<double> p;   // w'
    int stop = 0;
    ShotEnd end = ShotEnd::reached_end;
};

inline ShotResult shoot_profile(const RadialGrid& g, double a) {
    const int N = g.dim;
    const double h = g.h;
    ShotResult out;
    out.w.assign(g.n + 1, 0.0);
    out.p.assign(g.n + 1, 0.0);
    out.w[0] = a;
    auto rhs = [N](double r, const std::array<double, 2>& y) -> std::array<double, 2> {
        const double drift = y[0] - y[0] * y[0] * y[0];
        if (r == 0.0) return {y[1], drift / N};
        return {y[1], drift - (N - 1) / r * y[1]};
    };
    std::array<double, 2> y{a, 0.0};
    for (int i = 0; i < g.n; ++i) {
        const double r = g.r[i];
        const auto k1 = rhs(r, y);
        const auto k2 = rhs(r + 0.5 * h, {y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
        const auto k3 = rhs(r + 0.5 * h, {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
        const auto k4 = rhs(r + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
        y = {y[0] + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
             y[1] + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
        out.w[i + 1] = y[0];
        out.p[i + 1] = y[1];
        if (y[0] < 0.0) { out.stop = i + 1; out.end = ShotEnd::crossed; return out; }
        if (y[0] < 0.5 && y[1] > 0.0) { out.stop = i + 1; out.end = ShotEnd::diverged; return out; }
    }
    out.stop = g.n;
    return out;
}

// FV Laplacian rows 0..n-1 (Dirichlet at n) plus a diagonal term.
inline void assemble_rows(const RadialGrid& g, std::span<const double> pot,
                          std::vector<double>& sub, std::vector<double>& diag,
                          std::vector<double>& sup) {
    const int n = g.n;
    sub.assign(n, 0.0);
    diag.assign(n, 0.0);
    sup.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double ap = g.face[i];
        const double am = (i > 0) ? g.face[i - 1] : 0.0;
        diag[i] = -(ap + am) / g.vol[i] + pot[i];
        if (i < n - 1) sup[i] = ap / g.vol[i];
        if (i > 0) sub[i] = am / g.vol[i];
    }
}

inline std::vector<double> ode_rows(const RadialGrid& g, std::span<const double> w) {
    // residual of Delta_h w - w + w^3 at rows 0..n-1 (w[n] treated as Dirichlet data)
    const int n = g.n;
    std::vector<double> res(n);
    for (int i = 0; i < n; ++i) {
        const double up = (i < n) ? w[i + 1] : 0.0;
        double flux = g.face[i] * (up - w[i]);
        if (i > 0) flux -= g.face[i - 1] * (w[i] - w[i - 1]);
        res[i] = flux / g.vol[i] - w[i] + w[i] * w[i] * w[i];
    }
    return res;
}

// Newton-polish a profile onto the discrete equation Delta_h w - w + w^3 = 0,
// w(L) = 0.  Returns the final max-norm residual.
inline double polish_profile(const RadialGrid& g, std::vector<double>& w, double target,
                             int max_iter = 60) {
    const int n = g.n;
    w[n] = 0.0;
    std::vector<double> sub, diag, sup, pot(n);
    double resn = std::numeric_limits<double>::max();
    for (int it = 0; it < max_iter; ++it) {
        std::vector<double> res = ode_rows(g, w);
        resn = 0.0;
        for (double v : res) resn = std::max(resn, std::abs(v));
        if (resn < target) return resn;
        for (int i = 0; i < n; ++i) pot[i] = -1.0 + 3.0 * w[i] * w[i];
        assemble_rows(g, pot, sub, diag, sup);
        TridiagLU<double> lu(sub, diag, sup);
        if (lu.min_relative_pivot() < 1e-14)
            throw convergence_error("ground-state polish: singular Jacobian");
        for (double& v : res) v = -v;
        lu.solve_in_place(res);
        double step = 1.0;
        bool improved = false;
        for (int half = 0; half < 30; ++half) {
            std::vector<double> trial(w);
            for (int i = 0; i < n; ++i) trial[i] = w[i] + step * res[i];
            std::vector<double> tres = ode_rows(g, trial);
            double trn = 0.0;
            for (double v : tres) trn = std::max(trn, std::abs(v));
            if (trn < resn) {
                w = std::move(trial);
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) return resn;   // stalled at the rounding floor
    }
    return resn;
}

inline std::vector<double> central_derivative(const RadialGrid& g, std::span<const double> w) {
    const int n = g.n;
    std::vector<double> dw(n + 1);
    dw[0] = 0.0;   // symmetry at the origin
    for (int i = 1; i < n; ++i) dw[i] = (w[i + 1] - w[i - 1]) / (2.0 * g.h);
    dw[n] = (3.0 * w[n] - 4.0 * w[n - 1] + w[n - 2]) / (2.0 * g.h);
    return dw;
}

} // namespace detail

inline GroundState solve_ground_state(int dim, const RadialGrid& grid, double tol) {
    if (dim != 1 && dim != 2)
        throw dimension_error("solve_ground_state: dimension must be 1 or 2");
    if (grid.dim != dim)
        throw grid_error("solve_ground_state: grid dimension mismatch");
    if (!(tol > 0.0))
        throw grid_error("solve_ground_state: tolerance must be positive");
    if (std::exp(-grid.length) >= tol)
        throw resolution_error("solve_ground_state: truncation radius too small for tolerance");

    GroundState gs;
    gs.grid = grid;
    const int n = grid.n;
    gs.w.assign(n + 1, 0.0);
    gs.dw.assign(n + 1, 0.0);

    if (dim == 1) {
        const double s2 = std::sqrt(2.0);
        for (int i = 0; i <= n; ++i) {
            const double y = grid.r[i];
            gs.w[i] = s2 / std::cosh(y);
            gs.dw[i] = -s2 * std::tanh(y) / std::cosh(y);
        }
        gs.shoot_amplitude = gs.w[0];
        // the closed form satisfies the ODE identically; evaluate the defect
        // between the two analytic expressions for w''
        double resn = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double sech = gs.w[i] / s2;
            const double wpp = s2 * (sech - 2.0 * sech * sech * sech);
            resn = std::max(resn, std::abs(wpp - gs.w[i] + gs.w[i] * gs.w[i] * gs.w[i]));
        }
        gs.ode_residual = resn;
        return gs;
    }

    // N = 2: bisection on w(0) in [1, 4]
    double lo = 1.0, hi = 4.0;
    {
        auto slo = detail::shoot_profile(grid, lo);
        auto shi = detail::shoot_profile(grid, hi);
        if (slo.end == detail::ShotEnd::crossed || shi.end != detail::ShotEnd::crossed)
            throw convergence_error("solve_ground_state: shooting bracket [1,4] has no sign change");
    }
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        auto s = detail::shoot_profile(grid, mid);
        if (s.end == detail::ShotEnd::crossed) hi = mid; else lo = mid;
    }
    const double a = 0.5 * (lo + hi);
    auto shot = detail::shoot_profile(grid, a);
    gs.shoot_amplitude = a;
    gs.w = shot.w;
    if (shot.stop < n) {
        // replace the contaminated tail by pure exponential decay before polishing
        const double wm = std::max(shot.w[shot.stop], 0.0);
        for (int i = shot.stop; i <= n; ++i)
            gs.w[i] = wm * std::exp(-(grid.r[i] - grid.r[shot.stop]));
    }
    for (double& v : gs.w) v = std::max(v, 0.0);
    gs.w[n] = 0.0;

    const double target = std::min(1e-13, 10.0 * tol);
    gs.ode_residual = detail::polish_profile(grid, gs.w, target);
    if (!(gs.ode_residual < 10.0 * tol))
        throw resolution_error("solve_ground_state: residual " + std::to_string(gs.ode_residual) +
                               " exceeds 10*tol; grid too coarse");
    gs.dw = detail::central_derivative(grid, gs.w);
    return gs;
}

// w0 = (w + r w')/2; also used as L0^{-1} w in the operator identities.
inline void w0_profile(GroundState& gs) {
    const int n = gs.grid.n;
    gs.w0.assign(n + 1, 0.0);
    for (int i = 0; i <= n; ++i)
        gs.w0[i] = 0.5 * gs.w[i] + 0.5 * gs.grid.r[i] * gs.dw[i];
}

// closed-form-derivative quadrature of int y^2 (w_y)^2 over R (N = 1 only)
inline double appendix_integral(const GroundState& gs) {
    if (gs.grid.dim != 1)
        throw dimension_error("appendix_integral: defined for N = 1 only");
    const double s2 = std::sqrt(2.0);
    std::vector<double> f(gs.grid.n + 1);
    for (int i = 0; i <= gs.grid.n; ++i) {
        const double y = gs.grid.r[i];
        const double wy = -s2 * std::tanh(y) / std::cosh(y);
        f[i] = y * y * wy * wy;
    }
    return integrate(gs.grid, f);
}

inline void compute_moments(GroundState& gs) {
    if (gs.w0.empty()) w0_profile(gs);
    const RadialGrid& g = gs.grid;
    const int n = g.n;
    std::vector<double> f(n + 1);
    auto moment = [&](auto&& fn) {
        for (int i = 0; i <= n; ++i) f[i] = fn(i);
        return integrate(g, f);
    };
    gs.mom.m1 = moment([&](int i) { return gs.w[i]; });
    gs.mom.m2 = moment([&](int i) { return gs.w[i] * gs.w[i]; });
    gs.mom.m3 = moment([&](int i) { return gs.w[i] * gs.w[i] * gs.w[i]; });
    gs.mom.m4 = moment([&](int i) { return gs.w[i] * gs.w[i] * gs.w[i] * gs.w[i]; });
    gs.mom.g2 = moment([&](int i) { return gs.dw[i] * gs.dw[i]; });
    gs.mom.ww0 = moment([&](int i) { return gs.w[i] * gs.w0[i]; });
    gs.mom.w3w0 = moment([&](int i) { return gs.w[i] * gs.w[i] * gs.w[i] * gs.w0[i]; });
    gs.mom.w0sq = moment([&](int i) { return gs.w0[i] * gs.w0[i]; });
    if (g.dim == 1) gs.mom.y2 = appendix_integral(gs);
    if (g.dim == 2) gs.mom.c0 = gs.mom.m2 / (2.0 * gs.mom.w0sq);
}

// one call that produces the fully populated record
inline GroundState make_ground_state(int dim, int n = 4000, double length = 20.0,
                                     double tol = 1e-8) {
    RadialGrid g = RadialGrid::make(dim, n, length);
    GroundState gs = solve_ground_state(dim, g, tol);
    w0_profile(gs);
    compute_moments(gs);
    return gs;
}

// -------- identity suite (energy/Pohozaev/direct-integration checks) --------

struct IdentityReport {
    double pohozaev = 0.0;     // m4 - 4/(4-N) m2
    double gradient = 0.0;     // g2 - N/(4-N) m2
    double direct = 0.0;       // m1 - m3
    double ww0 = 0.0;          // int w w0 - (1/2 - N/4) m2
    double quad_error = 0.0;   // Richardson estimate of the quadrature error scale
    double worst_abs() const {
        return std::max({std::abs(pohozaev), std::abs(gradient), std::abs(direct), std::abs(ww0)});
    }
    bool pass(double tol) const { return worst_abs() <= tol; }
};

inline IdentityReport identity_report(const GroundState& gs) {
    const int N = gs.grid.dim;
    IdentityReport rep;
    rep.pohozaev = gs.mom.m4 - 4.0 / (4.0 - N) * gs.mom.m2;
    rep.gradient = gs.mom.g2 - static_cast<double>(N) / (4.0 - N) * gs.mom.m2;
    rep.direct = gs.mom.m1 - gs.mom.m3;
    rep.ww0 = gs.mom.ww0 - (0.5 - N / 4.0) * gs.mom.m2;
    // Richardson: redo m2 on the coarsened (every other node) grid
    if (gs.grid.n % 2 == 0 && gs.grid.n >= 8) {
        RadialGrid half = RadialGrid::make(N, gs.grid.n / 2, gs.grid.length);
        std::vector<double> f(half.n + 1);
        for (int i = 0; i <= half.n; ++i) f[i] = gs.w[2 * i] * gs.w[2 * i];
        rep.quad_error = std::abs(integrate(half, f) - gs.mom.m2) / 3.0;
    }
    // domain truncation: the slowest-decaying moment tail is int w ~ e^{-L}
    const double surf = (N == 1) ? 2.0 : 2.0 * std::numbers::pi;
    rep.quad_error += 4.0 * surf * std::pow(gs.grid.length, N - 1) * std::exp(-gs.grid.length);
    return rep;
}

} // namespace hotspot

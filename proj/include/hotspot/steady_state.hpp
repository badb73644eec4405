#pragma once

// Radial steady states of the rescaled hotspot system on the ball [0, R]:
//   eps^2 (r^{N-1} u')' = r^{N-1} (u - v u^3 - alpha0 eps^N)
//   (D0/eps^{2N}) (r^{N-1} u^2 v')' = r^{N-1} (eps^{-N} v u^3 - gamma0)
// with zero flux at both ends.  The v-diffusion dominates by D0/eps^{2N}, so
// v is carried in shadow form: a scalar anchor plus a deviation field with
// dev(0) = 0.  Fluxes are always differenced on the deviation array (the
// anchor cancels exactly), and the redundant finite-volume row is replaced by
// the exact mass balance
//   eps^{-N} int v u^3 = gamma0 |B_R|,
// which pins the anchor.  This keeps every Newton row resolvable to ~1e-14
// at any D0; assembling v and differencing it directly would bury the flux
// signal under the absolute rounding of v.

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hotspot/banded.hpp"
#include "hotspot/errors.hpp"
#include "hotspot/ground_state.hpp"
#include "hotspot/radial_grid.hpp"

namespace hotspot {

struct ModelParams {
    int dim = 1;
    double alpha0 = 1.0;     // intrinsic attractiveness
    double gamma0 = 1.0;     // offender introduction rate
    double radius = 1.0;     // ball radius R
    double eps = 0.05;       // attractiveness diffusion scale
    double d0 = 1e3;         // D(eps) = d0 / eps^{2N}
    double tau = 0.0;        // reaction-time ratio

    void validate() const {
        if (dim != 1 && dim != 2) throw dimension_error("ModelParams: dim must be 1 or 2");
        if (!(alpha0 > 0) || !(gamma0 > 0) || !(radius > 0) || !(eps > 0) || !(d0 > 0))
            throw grid_error("ModelParams: alpha0, gamma0, R, eps, D0 must be positive");
        if (tau < 0) throw grid_error("ModelParams: tau must be nonnegative");
    }
    double eps_n() const { return std::pow(eps, dim); }
    double ball_volume() const {
        return dim == 1 ? 2.0 * radius : std::numbers::pi * radius * radius;
    }
    double beta() const { return 1.0 / std::sqrt(d0); }
    double v0(const Moments& mom) const {
        const double s = mom.m3 / (gamma0 * ball_volume());
        return s * s;
    }
    double tau_tilde(const Moments& mom) const {
        return eps_n() * tau * mom.m2 / (gamma0 * ball_volume());
    }
    static double tau_from_tau_tilde(double tt, const ModelParams& par, const Moments& mom) {
        return tt * par.gamma0 * par.ball_volume() / (std::pow(par.eps, par.dim) * mom.m2);
    }
    // exact constant steady state of the rescaled system
    std::pair<double, double> constant_state() const {
        const double uc = eps_n() * (alpha0 + gamma0);
        const double vc = gamma0 * eps_n() / (uc * uc * uc);
        return {uc, vc};
    }
    int default_grid_n() const {
        if (eps < 0.02 * radius)
            throw resolution_error("ModelParams: eps below the desk-scale floor 0.02 R");
        return static_cast<int>(std::ceil(40.0 * radius / eps));
    }
};

// v = anchor + dev, dev[0] = 0
struct ShadowV {
    double anchor = 0.0;
    std::vector<double> dev;

    std::vector<double> full() const {
        std::vector<double> v(dev.size());
        for (size_t i = 0; i < dev.size(); ++i) v[i] = anchor + dev[i];
        return v;
    }
    static ShadowV from_full(std::span<const double> v) {
        ShadowV s;
        s.anchor = v[0];
        s.dev.resize(v.size());
        for (size_t i = 0; i < v.size(); ++i) s.dev[i] = v[i] - s.anchor;
        return s;
    }
    double at(size_t i) const { return anchor + dev[i]; }
};

struct SteadyStateSolution {
    ModelParams params;
    RadialGrid grid;
    std::vector<double> u;
    ShadowV v_shadow;
    std::vector<double> v;   // assembled anchor + dev, for output
    std::vector<double> residual_history;
    int iterations = 0;
    double residual = 0.0;
    double mass_defect = 0.0;    // gamma0 |B_R| - eps^{-N} int v u^3
};

namespace detail {

// cubic Hermite interpolation of the ground-state profile at stretched radius
inline double interp_profile(const GroundState& gs, double rho) {
    if (rho >= gs.grid.length) return 0.0;
    if (rho <= 0.0) return gs.w[0];
    const double h = gs.grid.h;
    const int i = std::min(static_cast<int>(rho / h), gs.grid.n - 1);
    const double t = (rho - gs.grid.r[i]) / h;
    const double w0 = gs.w[i], w1 = gs.w[i + 1];
    const double d0 = gs.dw[i] * h, d1 = gs.dw[i + 1] * h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * w0 + (t3 - 2 * t2 + t) * d0 +
           (-2 * t3 + 3 * t2) * w1 + (t3 - t2) * d1;
}

// quintic ramp: 1 for |s| <= 1, 0 for |s| >= 2, C^2 monotone in between
inline double cutoff(double s) {
    const double a = std::abs(s);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    const double t = a - 1.0;
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

} // namespace detail

class SteadySystem {
public:
    explicit SteadySystem(const ModelParams& par, int n_phys = 0) : par_(par) {
        par_.validate();
        const int n = (n_phys > 0) ? n_phys : par_.default_grid_n();
        grid_ = RadialGrid::make(par_.dim, n, par_.radius);
        sc_ = std::pow(par_.eps, 2 * par_.dim) / par_.d0;
        inv_eps_n_ = 1.0 / par_.eps_n();
    }

    const ModelParams& params() const { return par_; }
    const RadialGrid& grid() const { return grid_; }
    double sc() const { return sc_; }

    // pointwise residual of the u-equation
    std::vector<double> residual_u(std::span<const double> u, std::span<const double> v) const {
        const int n = grid_.n;
        std::vector<double> r(n + 1);
        const double e2 = par_.eps * par_.eps;
        for (int i = 0; i <= n; ++i) {
            double flux = 0.0;
            if (i < n) flux += grid_.face[i] * (u[i + 1] - u[i]);
            if (i > 0) flux -= grid_.face[i - 1] * (u[i] - u[i - 1]);
            r[i] = e2 * flux / grid_.vol[i] - u[i] + v[i] * u[i] * u[i] * u[i] +
                   par_.alpha0 * par_.eps_n();
        }
        return r;
    }

    // finite-volume v-rows 1..n in the (eps^{2N}/D0)-scaled form; the flux is
    // differenced on the deviation field
    std::vector<double> residual_v(std::span<const double> u, const ShadowV& v) const {
        const int n = grid_.n;
        std::vector<double> r(n);
        for (int i = 1; i <= n; ++i) {
            double flux = 0.0;
            if (i < n) {
                const double uf = 0.5 * (u[i] + u[i + 1]);
                flux += grid_.face[i] * uf * uf * (v.dev[i + 1] - v.dev[i]);
            }
            {
                const double uf = 0.5 * (u[i] + u[i - 1]);
                flux -= grid_.face[i - 1] * uf * uf * (v.dev[i] - v.dev[i - 1]);
            }
            r[i - 1] = flux / grid_.vol[i] -
                       sc_ * (inv_eps_n_ * v.at(i) * u[i] * u[i] * u[i] - par_.gamma0);
        }
        return r;
    }

    double mass_defect(std::span<const double> u, std::span<const double> v) const {
        double s = 0.0;
        for (int i = 0; i <= grid_.n; ++i)
            s += grid_.vol[i] * (inv_eps_n_ * v[i] * u[i] * u[i] * u[i] - par_.gamma0);
        return -s;   // gamma0 |B_R| - eps^{-N} int v u^3
    }

    double residual_norm(std::span<const double> u, const ShadowV& v) const {
        const std::vector<double> vf = v.full();
        double m = std::abs(mass_defect(u, vf));
        for (double x : residual_u(u, vf)) m = std::max(m, std::abs(x));
        for (double x : residual_v(u, v)) m = std::max(m, std::abs(x));
        return m;
    }

    // linear v-solve for given positive u: tridiagonal block over dev_1..dev_n
    // bordered by the anchor column and the mass row
    ShadowV solve_v_shadow(std::span<const double> u) const {
        const int n = grid_.n;
        for (int i = 0; i <= n; ++i)
            if (!(u[i] > 0.0)) throw grid_error("solve_v_given_u: u must be positive");
        std::vector<double> sub(n, 0.0), dia(n, 0.0), sup(n, 0.0), col(n), rhs(n);
        for (int i = 1; i <= n; ++i) {
            const int k = i - 1;
            double ap = 0.0;
            if (i < n) {
                const double uf = 0.5 * (u[i] + u[i + 1]);
                ap = grid_.face[i] * uf * uf / grid_.vol[i];
            }
            const double um = 0.5 * (u[i] + u[i - 1]);
            const double am = grid_.face[i - 1] * um * um / grid_.vol[i];
            dia[k] = -(ap + am) - sc_ * inv_eps_n_ * u[i] * u[i] * u[i];
            if (i < n) sup[k] = ap;
            if (i > 1) sub[k] = am;
            col[k] = -sc_ * inv_eps_n_ * u[i] * u[i] * u[i];
            rhs[k] = -sc_ * par_.gamma0;
        }
        TridiagLU<double> lu(sub, dia, sup);
        if (lu.min_relative_pivot() < 1e-14)
            throw convergence_error("solve_v_given_u: singular linear system");
        std::vector<double> y = lu.solve(rhs);
        std::vector<double> z = lu.solve(col);
        double d_dot_y = 0.0, d_dot_z = 0.0, e = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double di = grid_.vol[i] * inv_eps_n_ * u[i] * u[i] * u[i];
            e += di;
            if (i >= 1) {
                d_dot_y += di * y[i - 1];
                d_dot_z += di * z[i - 1];
            }
        }
        const double bm = par_.gamma0 * grid_.ball_volume();
        ShadowV v;
        v.anchor = (bm - d_dot_y) / (e - d_dot_z);
        v.dev.assign(n + 1, 0.0);
        for (int i = 1; i <= n; ++i) v.dev[i] = y[i - 1] - v.anchor * z[i - 1];
        for (int i = 0; i <= n; ++i)
            if (!(v.at(i) > 0.0))
                throw convergence_error("solve_v_given_u: positivity lost (maximum principle violated)");
        return v;
    }

    std::vector<double> solve_v_given_u(std::span<const double> u) const {
        return solve_v_shadow(u).full();
    }

    // cutoff spike ansatz + induced v
    std::pair<std::vector<double>, ShadowV> build_approximate(const GroundState& gs) const {
        if (par_.eps > par_.radius / 10.0)
            throw resolution_error("build_approximate: eps too large for the cutoff (need eps <= R/10)");
        const double v0 = par_.v0(gs.mom);
        const double amp = 1.0 / std::sqrt(v0);
        const double r0 = par_.radius / 3.0;
        const int n = grid_.n;
        std::vector<double> u(n + 1);
        for (int i = 0; i <= n; ++i) {
            const double rho = grid_.r[i] / par_.eps;
            u[i] = par_.alpha0 * par_.eps_n() +
                   amp * detail::interp_profile(gs, rho) * detail::cutoff(grid_.r[i] / r0);
        }
        ShadowV v = solve_v_shadow(u);
        return {std::move(u), std::move(v)};
    }

    SteadyStateSolution newton_solve(std::vector<double> u, ShadowV v, double tol = 1e-11,
                                     int max_iter = 60) const {
        const int n = grid_.n;
        if (static_cast<int>(u.size()) != n + 1 || static_cast<int>(v.dev.size()) != n + 1)
            throw grid_error("newton_solve: initial data has wrong size");
        SteadyStateSolution sol;
        sol.params = par_;
        sol.grid = grid_;

        const int m = 2 * n + 1;   // u_0..u_n interleaved with dev_1..dev_n
        auto uidx = [](int i) { return 2 * i; };
        auto vidx = [](int i) { return 2 * i - 1; };

        int it = 0;
        double resn = residual_norm(u, v);
        sol.residual_history.push_back(resn);
        for (; it < max_iter && resn >= tol; ++it) {
            BandedMatrix B(m, 3, 3);
            std::vector<double> border_col(m, 0.0), border_row(m, 0.0), rhs_main(m, 0.0);
            const double e2 = par_.eps * par_.eps;
            const std::vector<double> vf = v.full();
            const std::vector<double> ru = residual_u(u, vf);
            const std::vector<double> rv = residual_v(u, v);

            // u-rows
            for (int i = 0; i <= n; ++i) {
                const int row = uidx(i);
                double diag = -1.0 + 3.0 * vf[i] * u[i] * u[i];
                if (i < n) {
                    const double a = e2 * grid_.face[i] / grid_.vol[i];
                    diag -= a;
                    B.add(row, uidx(i + 1), a);
                }
                if (i > 0) {
                    const double a = e2 * grid_.face[i - 1] / grid_.vol[i];
                    diag -= a;
                    B.add(row, uidx(i - 1), a);
                }
                B.add(row, uidx(i), diag);
                if (i >= 1) B.add(row, vidx(i), u[i] * u[i] * u[i]);
                border_col[row] = u[i] * u[i] * u[i];
                rhs_main[row] = -ru[i];
            }
            // v-rows 1..n
            for (int i = 1; i <= n; ++i) {
                const int row = vidx(i);
                double diag = -sc_ * inv_eps_n_ * u[i] * u[i] * u[i];
                if (i < n) {
                    const double uf = 0.5 * (u[i] + u[i + 1]);
                    const double a = grid_.face[i] * uf * uf / grid_.vol[i];
                    diag -= a;
                    B.add(row, vidx(i + 1), a);
                    const double da = grid_.face[i] * uf * (v.dev[i + 1] - v.dev[i]) / grid_.vol[i];
                    B.add(row, uidx(i), da);
                    B.add(row, uidx(i + 1), da);
                }
                {
                    const double uf = 0.5 * (u[i] + u[i - 1]);
                    const double a = grid_.face[i - 1] * uf * uf / grid_.vol[i];
                    diag -= a;
                    if (i > 1) B.add(row, vidx(i - 1), a);
                    const double da = -grid_.face[i - 1] * uf * (v.dev[i] - v.dev[i - 1]) / grid_.vol[i];
                    B.add(row, uidx(i), da);
                    B.add(row, uidx(i - 1), da);
                }
                B.add(row, vidx(i), diag);
                B.add(row, uidx(i), -sc_ * inv_eps_n_ * 3.0 * vf[i] * u[i] * u[i]);
                border_col[row] = -sc_ * inv_eps_n_ * u[i] * u[i] * u[i];
                rhs_main[row] = -rv[i - 1];
            }
            // mass row (border)
            double e_border = 0.0;
            for (int i = 0; i <= n; ++i) {
                const double w3 = grid_.vol[i] * inv_eps_n_;
                border_row[uidx(i)] = w3 * 3.0 * vf[i] * u[i] * u[i];
                if (i >= 1) border_row[vidx(i)] = w3 * u[i] * u[i] * u[i];
                e_border += w3 * u[i] * u[i] * u[i];
            }
            const double rhs_mass = mass_defect(u, vf);

            if (!B.factorize())
                throw convergence_error("newton_solve: Jacobian singular");
            std::vector<double> z1 = rhs_main;
            B.solve_in_place(z1);
            std::vector<double> z2 = border_col;
            B.solve_in_place(z2);
            double d_z1 = 0.0, d_z2 = 0.0;
            for (int k = 0; k < m; ++k) {
                d_z1 += border_row[k] * z1[k];
                d_z2 += border_row[k] * z2[k];
            }
            const double denom = e_border - d_z2;
            if (denom == 0.0) throw convergence_error("newton_solve: bordered system singular");
            const double danchor = (rhs_mass - d_z1) / denom;

            // damped update with positivity safeguard
            double step = 1.0;
            bool accepted = false;
            for (int half = 0; half < 30; ++half) {
                std::vector<double> ut(u);
                ShadowV vt(v);
                vt.anchor = v.anchor + step * danchor;
                bool pos = true;
                for (int i = 0; i <= n; ++i) {
                    ut[i] = u[i] + step * (z1[uidx(i)] - danchor * z2[uidx(i)]);
                    if (i >= 1) vt.dev[i] = v.dev[i] + step * (z1[vidx(i)] - danchor * z2[vidx(i)]);
                    if (!(ut[i] > 0.0)) { pos = false; break; }
                }
                if (pos)
                    for (int i = 0; i <= n; ++i)
                        if (!(vt.at(i) > 0.0)) { pos = false; break; }
                if (pos) {
                    const double rn = residual_norm(ut, vt);
                    if (rn < resn) {
                        u = std::move(ut);
                        v = std::move(vt);
                        resn = rn;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if (!accepted) {
                std::string trace;
                for (double rr : sol.residual_history) trace += " " + std::to_string(rr);
                throw convergence_error(
                    "newton_solve: damping failed (step outside basin); residuals:" + trace, resn);
            }
            sol.residual_history.push_back(resn);
        }
        if (resn >= tol)
            throw convergence_error("newton_solve: no convergence after max iterations", resn);
        sol.u = std::move(u);
        sol.v_shadow = std::move(v);
        sol.v = sol.v_shadow.full();
        sol.iterations = it;
        sol.residual = resn;
        sol.mass_defect = mass_defect(sol.u, sol.v);
        return sol;
    }

    SteadyStateSolution newton_solve_full(std::vector<double> u, std::span<const double> v,
                                          double tol = 1e-11, int max_iter = 60) const {
        return newton_solve(std::move(u), ShadowV::from_full(v), tol, max_iter);
    }

private:
    ModelParams par_;
    RadialGrid grid_;
    double sc_ = 0.0;        // eps^{2N} / D0
    double inv_eps_n_ = 0.0;
};

// -------- diagnostics: residual norms, flatness, profile remainder --------

struct SteadyDiagnostics {
    double s_norm = 0.0;              // ||S_eps||_** of the supplied pair
    double flatness_const = 0.0;      // sup |v(r)-v(0)| D0 / r^2
    double phi_sup_C = 0.0;           // sup |phi| / (eps^{1+N} max(e^{-rho/2}, sqrt(eps)))
    double phi_star = 0.0;            // ||phi||_* (stretched H^2 + weighted sup)
    double phi_star_over_eps_n = 0.0;
    double v0_gap = 0.0;              // v(0) - v0
    double u0 = 0.0;
    double u0_predicted = 0.0;        // alpha0 eps^N + v0^{-1/2} w(0)
    double mass_defect = 0.0;
};

// ||f||_** = L2 over the stretched ball + weighted sup with weight
// max(e^{-rho/2}, sqrt(eps))^{-1}, rho = r/eps
inline double star2_norm(const ModelParams& par, const RadialGrid& g, std::span<const double> f) {
    double l2 = 0.0, sup = 0.0;
    const double se = std::sqrt(par.eps);
    for (int i = 0; i <= g.n; ++i) {
        l2 += g.vol[i] * f[i] * f[i];
        const double rho = g.r[i] / par.eps;
        const double wgt = std::max(std::exp(-0.5 * rho), se);
        sup = std::max(sup, std::abs(f[i]) / wgt);
    }
    return std::sqrt(l2 / par.eps_n()) + sup;
}

inline SteadyDiagnostics diagnostics(const SteadySystem& sys, std::span<const double> u,
                                     std::span<const double> v, const GroundState& gs) {
    const ModelParams& par = sys.params();
    const RadialGrid& g = sys.grid();
    SteadyDiagnostics d;
    const std::vector<double> su = sys.residual_u(u, v);
    d.s_norm = star2_norm(par, g, su);
    for (int i = 1; i <= g.n; ++i)
        d.flatness_const = std::max(d.flatness_const,
                                    std::abs(v[i] - v[0]) * par.d0 / (g.r[i] * g.r[i]));
    const double v0 = par.v0(gs.mom);
    d.v0_gap = v[0] - v0;
    d.u0 = u[0];
    d.u0_predicted = par.alpha0 * par.eps_n() + gs.w[0] / std::sqrt(v0);

    // remainder against the spike profile built from the computed v(0)
    const int n = g.n;
    std::vector<double> phi(n + 1);
    const double amp = 1.0 / std::sqrt(v[0]);
    for (int i = 0; i <= n; ++i) {
        const double rho = g.r[i] / par.eps;
        phi[i] = u[i] - (par.alpha0 * par.eps_n() + amp * detail::interp_profile(gs, rho));
    }
    const double se = std::sqrt(par.eps);
    double l2 = 0.0;
    double supw = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double rho = g.r[i] / par.eps;
        const double wgt = std::max(std::exp(-0.5 * rho), se);
        d.phi_sup_C = std::max(d.phi_sup_C,
                               std::abs(phi[i]) / (std::pow(par.eps, 1 + par.dim) * wgt));
        supw = std::max(supw, std::abs(phi[i]) / wgt);
        double dr = 0.0, drr = 0.0;
        if (i > 0 && i < n) {
            dr = (phi[i + 1] - phi[i - 1]) / (2 * g.h);
            drr = (phi[i + 1] - 2 * phi[i] + phi[i - 1]) / (g.h * g.h);
        }
        const double e1 = par.eps * dr, e2 = par.eps * par.eps * drr;
        l2 += g.vol[i] * (phi[i] * phi[i] + e1 * e1 + e2 * e2);
    }
    d.phi_star = std::sqrt(l2 / par.eps_n()) + supw;
    d.phi_star_over_eps_n = d.phi_star / par.eps_n();
    d.mass_defect = sys.mass_defect(u, v);
    return d;
}

} // namespace hotspot

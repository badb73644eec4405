#pragma once

// Semi-implicit time integration of the radial hotspot system
//   u_t = eps^2 Delta u - u + v u^3 + alpha0 eps^N
//   tau (u^2 v)_t = (D0/eps^{2N}) div(u^2 grad v) - eps^{-N} v u^3 + gamma0
// with prognostic q = u^2 v, so the tau-term is integrated without a
// product-rule splitting error.  Diffusion blocks are implicit (the v-flux
// linearized about the fresh u), reactions explicit, first order in dt.
// Positivity loss triggers dt halving; the scheme's fixed points are exactly
// the discrete steady states of steady_state.hpp because both use the same
// finite-volume operators.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hotspot/errors.hpp"
#include "hotspot/radial_grid.hpp"
#include "hotspot/steady_state.hpp"
#include "hotspot/tridiag.hpp"

namespace hotspot {

struct SimConfig {
    ModelParams params;
    double dt = 5e-3;
    double t_end = 25.0;
    int n_phys = 0;              // 0: use the steady-state default 40 R / eps
    int max_halvings = 20;       // positivity retries per step
    double noise_floor = 1e-9;   // envelope peaks below floor*|u0_ref| are ignored

    void validate() const {
        params.validate();
        if (!(dt > 0.0)) throw grid_error("SimConfig: dt must be positive");
        if (!(t_end > dt)) throw grid_error("SimConfig: t_end must exceed dt");
        if (params.tau <= 0.0)
            throw grid_error("SimConfig: time integration requires tau > 0");
    }
};

struct SimState {
    double t = 0.0;
    std::vector<double> u;
    std::vector<double> q;   // u^2 v
    std::vector<double> v;   // derived q/u^2

    void sync_v() {
        v.resize(u.size());
        for (size_t i = 0; i < u.size(); ++i) v[i] = q[i] / (u[i] * u[i]);
    }
};

inline SimState make_state(std::span<const double> u, std::span<const double> v, double t = 0.0) {
    SimState s;
    s.t = t;
    s.u.assign(u.begin(), u.end());
    s.q.resize(u.size());
    for (size_t i = 0; i < u.size(); ++i) s.q[i] = u[i] * u[i] * v[i];
    s.sync_v();
    return s;
}

// steady state plus a relative Gaussian bump of width 2 eps at the origin
inline SimState perturbed_state(const RadialGrid& g, std::span<const double> u,
                                std::span<const double> v, double eps, double rel_amp) {
    std::vector<double> up(u.begin(), u.end());
    for (int i = 0; i <= g.n; ++i) {
        const double z = g.r[i] / (2.0 * eps);
        up[i] = u[i] * (1.0 + rel_amp * std::exp(-z * z));
    }
    return make_state(up, v);
}

class Simulator {
public:
    Simulator(const SimConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        sys_ = std::make_unique<SteadySystem>(cfg_.params, cfg_.n_phys);
    }

    const RadialGrid& grid() const { return sys_->grid(); }
    const SteadySystem& system() const { return *sys_; }

    // single IMEX step with dt halving on positivity loss; updates state in place
    void step(SimState& s, double dt_target = 0.0) const {
        const double want = (dt_target > 0.0) ? dt_target : cfg_.dt;
        double dt = want;
        for (int attempt = 0; attempt <= cfg_.max_halvings; ++attempt) {
            SimState trial = advance(s, dt);
            bool pos = true;
            for (size_t i = 0; i < trial.u.size(); ++i)
                if (!(trial.u[i] > 0.0) || !(trial.q[i] > 0.0)) { pos = false; break; }
            if (pos) {
                trial.sync_v();
                s = std::move(trial);
                return;
            }
            dt *= 0.5;
        }
        throw convergence_error("pde_sim: persistent positivity loss after dt halvings");
    }

private:
    // Both substeps solve for the increment, with the right-hand side
    // evaluated as flux differences of the current state.  Discrete steady
    // states are then fixed points of the scheme to rounding: the increment
    // right-hand side IS the steady residual.
    SimState advance(const SimState& s, double dt) const {
        const ModelParams& par = cfg_.params;
        const RadialGrid& g = sys_->grid();
        const int n = g.n;
        const double e2 = par.eps * par.eps;
        const double inv_en = 1.0 / par.eps_n();
        const double D = par.d0 / std::pow(par.eps, 2 * par.dim);

        SimState out;
        out.t = s.t + dt;

        // u-step: (I/dt - eps^2 Lap) du = eps^2 Lap u + reaction(u, v)
        std::vector<double> sub(n + 1, 0.0), dia(n + 1, 0.0), sup(n + 1, 0.0), rhs(n + 1, 0.0);
        for (int i = 0; i <= n; ++i) {
            double diag = 1.0 / dt;
            double flux = 0.0;
            if (i < n) {
                const double a = e2 * g.face[i] / g.vol[i];
                diag += a;
                sup[i] = -a;
                flux += e2 * g.face[i] * (s.u[i + 1] - s.u[i]);
            }
            if (i > 0) {
                const double a = e2 * g.face[i - 1] / g.vol[i];
                diag += a;
                sub[i] = -a;
                flux -= e2 * g.face[i - 1] * (s.u[i] - s.u[i - 1]);
            }
            dia[i] = diag;
            rhs[i] = flux / g.vol[i] - s.u[i] + s.v[i] * s.u[i] * s.u[i] * s.u[i] +
                     par.alpha0 * par.eps_n();
        }
        TridiagLU<double> lu_u(sub, dia, sup);
        std::vector<double> du = lu_u.solve(rhs);
        out.u.resize(n + 1);
        for (int i = 0; i <= n; ++i) out.u[i] = s.u[i] + du[i];

        // q-step: (tau/dt - D div(uf^2 grad(./u_new^2))) dq
        //            = D div(uf^2 grad(q/u_new^2)) - eps^{-N} v u_new^3 + gamma0
        std::vector<double> inv_u2(n + 1), vstar(n + 1);
        for (int i = 0; i <= n; ++i) {
            inv_u2[i] = 1.0 / (out.u[i] * out.u[i]);
            vstar[i] = s.q[i] * inv_u2[i];
        }
        for (int i = 0; i <= n; ++i) {
            double diag = par.tau / dt;
            double up = 0.0, lo = 0.0, flux = 0.0;
            if (i < n) {
                const double uf = 0.5 * (out.u[i] + out.u[i + 1]);
                const double a = D * g.face[i] * uf * uf / g.vol[i];
                diag += a * inv_u2[i];
                up = -a * inv_u2[i + 1];
                flux += D * g.face[i] * uf * uf * (vstar[i + 1] - vstar[i]);
            }
            if (i > 0) {
                const double uf = 0.5 * (out.u[i] + out.u[i - 1]);
                const double a = D * g.face[i - 1] * uf * uf / g.vol[i];
                diag += a * inv_u2[i];
                lo = -a * inv_u2[i - 1];
                flux -= D * g.face[i - 1] * uf * uf * (vstar[i] - vstar[i - 1]);
            }
            dia[i] = diag;
            sup[i] = up;
            sub[i] = lo;
            // explicit reaction with the old v
            rhs[i] = flux / g.vol[i] -
                     inv_en * s.v[i] * out.u[i] * out.u[i] * out.u[i] + par.gamma0;
        }
        TridiagLU<double> lu_q(sub, dia, sup);
        std::vector<double> dq = lu_q.solve(rhs);
        out.q.resize(n + 1);
        for (int i = 0; i <= n; ++i) out.q[i] = s.q[i] + dq[i];
        return out;
    }

    SimConfig cfg_;
    std::unique_ptr<SteadySystem> sys_;
};

struct TrajectoryPoint {
    double t = 0.0;
    double u0 = 0.0;
    double v0 = 0.0;
    double amp = 0.0;    // |u0 - u0_ref|
};

struct RunSummary {
    double sigma = 0.0;            // envelope growth rate
    double omega = 0.0;            // oscillation frequency (0: no oscillation found)
    int peaks_used = 0;
    bool oscillatory = false;
    double max_deviation = 0.0;    // max |u0 - ref| / ref
    double u0_ref = 0.0;
    std::string verdict;           // "stable" or "unstable"
    std::vector<TrajectoryPoint> trajectory;
};

namespace detail {

struct EnvelopeFit {
    double sigma = 0.0, omega = 0.0;
    int peaks = 0;
    bool oscillatory = false;
};

inline EnvelopeFit fit_envelope(const std::vector<TrajectoryPoint>& traj, double u0_ref,
                                double noise_floor) {
    EnvelopeFit fit;
    if (traj.size() < 8) return fit;
    const size_t start = traj.size() / 2;
    std::vector<double> pk_t, pk_a;
    for (size_t i = start + 1; i + 1 < traj.size(); ++i) {
        const double x0 = traj[i - 1].u0 - u0_ref;
        const double x1 = traj[i].u0 - u0_ref;
        const double x2 = traj[i + 1].u0 - u0_ref;
        if ((x1 - x0) * (x2 - x1) < 0.0 && std::abs(x1) > noise_floor * std::abs(u0_ref)) {
            pk_t.push_back(traj[i].t);
            pk_a.push_back(std::abs(x1));
        }
    }
    // merge plateau artifacts: drop peaks closer than a quarter of the median
    // spacing, keeping the larger amplitude
    if (pk_t.size() >= 3) {
        std::vector<double> gaps;
        for (size_t k = 1; k < pk_t.size(); ++k) gaps.push_back(pk_t[k] - pk_t[k - 1]);
        std::sort(gaps.begin(), gaps.end());
        const double med = gaps[gaps.size() / 2];
        std::vector<double> mt, ma;
        for (size_t k = 0; k < pk_t.size(); ++k) {
            if (!mt.empty() && pk_t[k] - mt.back() < 0.25 * med) {
                if (pk_a[k] > ma.back()) { mt.back() = pk_t[k]; ma.back() = pk_a[k]; }
            } else {
                mt.push_back(pk_t[k]);
                ma.push_back(pk_a[k]);
            }
        }
        pk_t.swap(mt);
        pk_a.swap(ma);
    }
    fit.peaks = static_cast<int>(pk_t.size());
    if (fit.peaks >= 4) {
        // linear regression of log amplitude; omega from the median half-period
        double st = 0, sy = 0, stt = 0, sty = 0;
        for (size_t k = 0; k < pk_t.size(); ++k) {
            const double y = std::log(pk_a[k]);
            st += pk_t[k];
            sy += y;
            stt += pk_t[k] * pk_t[k];
            sty += pk_t[k] * y;
        }
        const double np = static_cast<double>(pk_t.size());
        fit.sigma = (np * sty - st * sy) / (np * stt - st * st);
        std::vector<double> gaps;
        for (size_t k = 1; k < pk_t.size(); ++k) gaps.push_back(pk_t[k] - pk_t[k - 1]);
        std::sort(gaps.begin(), gaps.end());
        fit.omega = std::numbers::pi / gaps[gaps.size() / 2];
        fit.oscillatory = true;
        return fit;
    }
    // no oscillation: fit log|u0 - ref| directly over the last-half window
    double st = 0, sy = 0, stt = 0, sty = 0;
    int used = 0;
    for (size_t i = start; i < traj.size(); ++i) {
        const double a = std::abs(traj[i].u0 - u0_ref);
        if (a <= noise_floor * std::abs(u0_ref)) continue;
        const double y = std::log(a);
        st += traj[i].t;
        sy += y;
        stt += traj[i].t * traj[i].t;
        sty += traj[i].t * y;
        ++used;
    }
    if (used >= 4) {
        const double np = used;
        fit.sigma = (np * sty - st * sy) / (np * stt - st * st);
    }
    return fit;
}

} // namespace detail

inline RunSummary run_simulation(const SimConfig& cfg, SimState state, double u0_ref) {
    Simulator sim(cfg);
    RunSummary out;
    out.u0_ref = u0_ref;
    const int nsteps = static_cast<int>(std::ceil(cfg.t_end / cfg.dt));
    out.trajectory.reserve(nsteps + 1);
    auto record = [&](const SimState& s) {
        out.trajectory.push_back({s.t, s.u[0], s.v[0], std::abs(s.u[0] - u0_ref)});
        out.max_deviation = std::max(out.max_deviation, std::abs(s.u[0] - u0_ref) / std::abs(u0_ref));
    };
    record(state);
    for (int k = 0; k < nsteps; ++k) {
        sim.step(state);
        record(state);
    }
    const auto fit = detail::fit_envelope(out.trajectory, u0_ref, cfg.noise_floor);
    out.sigma = fit.sigma;
    out.omega = fit.omega;
    out.peaks_used = fit.peaks;
    out.oscillatory = fit.oscillatory;
    out.verdict = (out.sigma > 0.0) ? (fit.oscillatory ? "unstable-oscillatory" : "unstable")
                                    : "stable";
    return out;
}

} // namespace hotspot

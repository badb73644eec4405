#pragma once

// The nonlocal eigenvalue problem for a single radial spike:
//   L0 phi - 3/(1+tt*lam) <w^2,phi>/<w^3> w^3 - 2 tt lam/(1+tt lam) <w,phi>/<w^2> w^3 = lam phi
// with tt the rescaled reaction-time ratio.  Both nonlocal terms multiply
// w^3, so every eigenfunction with nonvanishing projection is a multiple of
// (L0-lam)^{-1} w^3 and the problem reduces to the scalar characteristic
// equation F(lam; tt) = 0 with
//   F = 3/(1+tt lam) <w^2, psi>/m3 + 2 tt lam/(1+tt lam) <w, psi>/m2 - 1,
//   psi = (L0-lam)^{-1} w^3.
// All inner products use the operator-consistent profile and the grid
// weights, which forces F(0) = 1/2 exactly at the discrete level.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hotspot/errors.hpp"
#include "hotspot/ground_state.hpp"
#include "hotspot/linearized_operator.hpp"

namespace hotspot {

using Complex = std::complex<double>;

class NlepProblem {
public:
    NlepProblem(const GroundState& gs, const LinearizedOperator& op, double tau_tilde)
        : gs_(&gs), op_(&op), tau_tilde_(tau_tilde) {
        if (tau_tilde < 0.0) throw grid_error("NlepProblem: tau_tilde must be nonnegative");
        if (!gs.grid.same_as(op.grid())) throw grid_error("NlepProblem: gs and operator grids differ");
        const auto& w = op.profile();
        const int n = op.grid().n;
        w3_.resize(n + 1);
        for (int i = 0; i <= n; ++i) w3_[i] = w[i] * w[i] * w[i];
        std::vector<double> w2(n + 1);
        for (int i = 0; i <= n; ++i) w2[i] = w[i] * w[i];
        m2_ = integrate(op.grid(), w2);
        m3_ = integrate(op.grid(), w3_);
    }

    const GroundState& ground_state() const { return *gs_; }
    const LinearizedOperator& op() const { return *op_; }
    int dim() const { return gs_->grid.dim; }
    double tau_tilde() const { return tau_tilde_; }
    void set_tau_tilde(double t) {
        if (t < 0.0) throw grid_error("NlepProblem: tau_tilde must be nonnegative");
        tau_tilde_ = t;
    }
    double m2() const { return m2_; }
    double m3() const { return m3_; }

    // asymptotic reference constants from the ground-state moments
    double gs_c0() const {
        if (!(gs_->mom.w0sq > 0.0))
            throw grid_error("NlepProblem: ground-state moments not computed");
        return gs_->mom.m2 / (2.0 * gs_->mom.w0sq);
    }
    double gs_re_limit() const {
        if (!(gs_->mom.w0sq > 0.0))
            throw grid_error("NlepProblem: ground-state moments not computed");
        return 4.0 * gs_->mom.w0sq / gs_->mom.m2 - 1.0;
    }

    Complex characteristic(Complex lambda) const {
        const double tt = tau_tilde_;
        if (tt > 0.0) {
            const Complex denom = 1.0 + tt * lambda;
            if (std::abs(denom) < 1e-10 * (1.0 + std::abs(tt * lambda)))
                throw pole_error("characteristic: lambda at the pole -1/tau_tilde");
        }
        const auto psi = op_->resolve_shifted(lambda, w3_);
        const auto& w = op_->profile();
        const auto& vol = op_->grid().vol;
        Complex a{0.0, 0.0}, b{0.0, 0.0};
        const int n = op_->grid().n;
        for (int i = 0; i < n; ++i) {
            const double qi = vol[i];
            a += qi * w[i] * w[i] * psi[i];
            b += qi * w[i] * psi[i];
        }
        const Complex ttl = tt * lambda;
        return 3.0 / (1.0 + ttl) * (a / m3_) + 2.0 * ttl / (1.0 + ttl) * (b / m2_) - 1.0;
    }

private:
    const GroundState* gs_;
    const LinearizedOperator* op_;
    double tau_tilde_;
    std::vector<double> w3_;
    double m2_ = 0.0, m3_ = 0.0;
};

inline Complex characteristic_value(const NlepProblem& p, Complex lambda) {
    return p.characteristic(lambda);
}

struct RootOptions {
    double tol = 1e-10;       // on |F|
    int max_iter = 60;
    double fd_step = 1e-7;    // derivative step scale
};

// complex Newton on F with finite-difference derivative
inline Complex find_eigenvalue(const NlepProblem& p, Complex lambda_init,
                               const RootOptions& opt = {}) {
    Complex lam = lambda_init;
    auto eval = [&p](Complex z) {
        try {
            return p.characteristic(z);
        } catch (const shift_at_spectrum&) {
            throw convergence_error("find_eigenvalue: iterate captured by a resolvent pole");
        } catch (const pole_error&) {
            throw convergence_error("find_eigenvalue: iterate captured by the pole -1/tau_tilde");
        }
    };
    for (int it = 0; it < opt.max_iter; ++it) {
        const Complex f = eval(lam);
        if (std::abs(f) < opt.tol) return lam;
        const double d = opt.fd_step * (1.0 + std::abs(lam));
        const Complex fp = (eval(lam + d) - f) / d;
        if (fp == Complex{0.0, 0.0})
            throw convergence_error("find_eigenvalue: vanishing derivative");
        const Complex step = f / fp;
        lam -= step;
        if (!std::isfinite(lam.real()) || !std::isfinite(lam.imag()) || std::abs(lam) > 1e6)
            throw convergence_error("find_eigenvalue: divergence");
        if (p.tau_tilde() > 0.0 &&
            std::abs(lam + 1.0 / p.tau_tilde()) < 1e-9 * (1.0 + 1.0 / p.tau_tilde()))
            throw convergence_error("find_eigenvalue: iterate captured by the pole -1/tau_tilde");
    }
    throw convergence_error("find_eigenvalue: no convergence after max iterations");
}

struct BranchPoint {
    double tau_tilde = 0.0;
    Complex lambda;
    double abs_F = 0.0;
};

struct EigenBranch {
    std::vector<BranchPoint> points;
    int re_sign_changes = 0;
    bool aborted = false;
    std::string seed_info;
};

namespace detail {

inline bool continuation_ok(Complex prev, Complex next) {
    return std::abs(next - prev) <= 0.5 * (1.0 + std::abs(prev));
}

// root at tau seeded from lam; recursive geometric bisection of the tau step
inline bool continue_to(const NlepProblem& base, double tau_from, double tau_to, Complex& lam,
                        int depth, EigenBranch& branch) {
    NlepProblem p(base);
    p.set_tau_tilde(tau_to);
    try {
        const Complex next = find_eigenvalue(p, lam);
        if (continuation_ok(lam, next)) {
            lam = next;
            return true;
        }
    } catch (const convergence_error&) {
        // fall through to bisection
    }
    if (depth >= 8) return false;
    const double mid = std::sqrt(tau_from * tau_to);
    if (!continue_to(base, tau_from, mid, lam, depth + 1, branch)) return false;
    return continue_to(base, mid, tau_to, lam, depth + 1, branch);
}

} // namespace detail

// geometric sweep over [tau_lo, tau_hi] tracking one eigenvalue branch
inline EigenBranch scan_branch(const NlepProblem& p, double tau_lo, double tau_hi, int steps,
                               Complex lambda_seed) {
    if (tau_lo <= 0.0 || tau_hi <= 0.0)
        throw grid_error("scan_branch: tau range must be positive");
    EigenBranch branch;
    branch.seed_info = "seed at tau_tilde=" + std::to_string(tau_lo);
    NlepProblem q(p);
    q.set_tau_tilde(tau_lo);
    Complex lam = find_eigenvalue(q, lambda_seed);
    branch.points.push_back({tau_lo, lam, std::abs(q.characteristic(lam))});
    if (tau_lo == tau_hi || steps <= 1) return branch;

    const double ratio = std::pow(tau_hi / tau_lo, 1.0 / (steps - 1));
    double tau_prev = tau_lo;
    for (int k = 1; k < steps; ++k) {
        const double tau_k = (k == steps - 1) ? tau_hi : tau_lo * std::pow(ratio, k);
        if (!detail::continue_to(p, tau_prev, tau_k, lam, 0, branch)) {
            branch.aborted = true;
            return branch;
        }
        NlepProblem pk(p);
        pk.set_tau_tilde(tau_k);
        branch.points.push_back({tau_k, lam, std::abs(pk.characteristic(lam))});
        const double re_prev = branch.points[branch.points.size() - 2].lambda.real();
        if ((re_prev < 0.0) != (lam.real() < 0.0)) ++branch.re_sign_changes;
        tau_prev = tau_k;
    }
    return branch;
}

struct Rectangle {
    double re_lo = 0.0, re_hi = 0.0, im_lo = 0.0, im_hi = 0.0;
    bool contains(Complex z) const {
        return z.real() > re_lo && z.real() < re_hi && z.imag() > im_lo && z.imag() < im_hi;
    }
    bool zero_area() const { return re_lo >= re_hi || im_lo >= im_hi; }
};

namespace detail {

// total argument increment of F along the segment [a, b] / (2 pi); refines
// until consecutive phase jumps are below pi/2
inline double edge_arg_sum(const NlepProblem& p, Complex a, Complex b) {
    struct Node { Complex z; Complex f; };
    std::vector<Node> nodes;
    const int init = 24;
    nodes.reserve(init + 1);
    for (int i = 0; i <= init; ++i) {
        const Complex z = a + (b - a) * (static_cast<double>(i) / init);
        nodes.push_back({z, p.characteristic(z)});
    }
    const double min_step = 1e-11 * std::abs(b - a);
    double total = 0.0;
    size_t i = 0;
    int guard = 0;
    while (i + 1 < nodes.size()) {
        const Complex f0 = nodes[i].f, f1 = nodes[i + 1].f;
        if (std::abs(f0) < 1e-13 || std::abs(f1) < 1e-13)
            throw pole_error("count_unstable: contour passes through a zero of F");
        const double dphi = std::arg(f1 / f0);
        if (std::abs(dphi) > 0.5 * std::numbers::pi &&
            std::abs(nodes[i + 1].z - nodes[i].z) > min_step) {
            if (++guard > 100000)
                throw convergence_error("count_unstable: excessive contour refinement");
            const Complex zm = 0.5 * (nodes[i].z + nodes[i + 1].z);
            nodes.insert(nodes.begin() + i + 1, {zm, p.characteristic(zm)});
            continue;
        }
        total += dphi;
        ++i;
    }
    return total / (2.0 * std::numbers::pi);
}

} // namespace detail

// zeros of F inside the rectangle by the argument principle; the resolvent
// pole mu0 adds +1 to winding + zero count when enclosed with nonzero
// projection.  Contour nudged outward on pole/zero collisions.
inline int count_unstable(const NlepProblem& p, Rectangle box) {
    if (box.zero_area()) return 0;
    if (box.re_lo < 0.0)
        throw grid_error("count_unstable: rectangle must lie in the right half-plane");

    const RadialSpectrum sp = p.op().radial_spectrum();
    for (int nudge = 0; nudge < 6; ++nudge) {
        int poles_inside = 0;
        if (box.contains({sp.mu0, 0.0}) &&
            std::abs(sp.w2_projection) > 1e-10 * p.m2())
            poles_inside = 1;
        try {
            const Complex c1{box.re_lo, box.im_lo}, c2{box.re_hi, box.im_lo},
                c3{box.re_hi, box.im_hi}, c4{box.re_lo, box.im_hi};
            const double wind = detail::edge_arg_sum(p, c1, c2) + detail::edge_arg_sum(p, c2, c3) +
                                detail::edge_arg_sum(p, c3, c4) + detail::edge_arg_sum(p, c4, c1);
            const long rounded = std::lround(wind);
            if (std::abs(wind - rounded) > 0.05)
                throw convergence_error("count_unstable: non-integer winding " + std::to_string(wind));
            const long zeros = rounded + poles_inside;
            if (zeros < 0)
                throw convergence_error("count_unstable: negative zero count; pole bookkeeping failed");
            return static_cast<int>(zeros);
        } catch (const pole_error&) {
            const double d = 1e-5 * (1.0 + std::abs(box.re_hi) + std::abs(box.im_hi));
            box.re_lo = std::max(0.0, box.re_lo - d);
            box.re_hi += d;
            box.im_lo -= d;
            box.im_hi += d;
        } catch (const shift_at_spectrum&) {
            const double d = 1e-5 * (1.0 + std::abs(box.re_hi) + std::abs(box.im_hi));
            box.re_lo = std::max(0.0, box.re_lo - d);
            box.re_hi += d;
            box.im_lo -= d;
            box.im_hi += d;
        }
    }
    throw convergence_error("count_unstable: edge-pole collision persists after max nudges");
}

struct HopfResult {
    double tau_h = 0.0;
    Complex lambda_h;
    int branch_steps = 0;
};

// large-tau seed for the dominant branch, from the profile moments
inline Complex asymptotic_seed(const NlepProblem& p, double tau) {
    if (p.dim() == 2) {
        const double c0 = p.gs_c0();
        return std::polar(std::cbrt(c0 / tau), std::numbers::pi / 3.0);
    }
    const double b = p.gs_re_limit();
    return {b / tau, std::sqrt(2.0 / tau)};
}

// bisection in log(tau) for Re lambda = 0 along the tracked branch
inline HopfResult find_hopf(const NlepProblem& p, double tau_lo, double tau_hi,
                            double re_tol = 1e-8) {
    if (!(tau_lo > 0.0) || !(tau_hi > tau_lo))
        throw bracket_error("find_hopf: need 0 < tau_lo < tau_hi");
    // track the dominant branch downward from tau_hi
    EigenBranch br = scan_branch(p, tau_hi, tau_lo, 80, asymptotic_seed(p, tau_hi));
    if (br.aborted)
        throw convergence_error("find_hopf: branch continuation aborted");
    std::optional<std::pair<BranchPoint, BranchPoint>> crossing;
    for (size_t i = 1; i < br.points.size(); ++i) {
        if ((br.points[i - 1].lambda.real() > 0.0) && (br.points[i].lambda.real() < 0.0)) {
            crossing = {br.points[i], br.points[i - 1]};   // (negative side, positive side)
            break;
        }
    }
    if (!crossing)
        throw bracket_error("find_hopf: no crossing found; Re(lambda) does not change sign in bracket");

    HopfResult res;
    auto [neg, pos] = *crossing;
    res.branch_steps = static_cast<int>(br.points.size());
    Complex lam = neg.lambda;
    double lo = neg.tau_tilde, hi = pos.tau_tilde;   // lo: Re<0 side
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        NlepProblem q(p);
        q.set_tau_tilde(mid);
        lam = find_eigenvalue(q, lam);
        if (std::abs(lam.real()) < re_tol) {
            if (std::abs(lam.imag()) < 1e-6 * (1.0 + std::abs(lam)))
                throw convergence_error("find_hopf: non-Hopf crossing (Im lambda collapses)");
            res.tau_h = mid;
            res.lambda_h = lam;
            return res;
        }
        if (lam.real() < 0.0) lo = mid; else hi = mid;
        if (hi / lo - 1.0 < 1e-14)
            break;
    }
    throw convergence_error("find_hopf: bisection stalled before |Re lambda| < tolerance");
}

struct AsymptoticsEntry {
    double tau_tilde = 0.0;
    Complex lambda;
    double abs_F = 0.0;
    // dimension-specific checks (NaN when not applicable)
    double mod_ratio = std::numeric_limits<double>::quiet_NaN();   // |lam|^3 tau / c0      (N=2)
    double arg_error = std::numeric_limits<double>::quiet_NaN();   // arg lam - pi/3        (N=2)
    double im_scaled = std::numeric_limits<double>::quiet_NaN();   // Im lam * sqrt(tau)    (N=1)
    double re_scaled = std::numeric_limits<double>::quiet_NaN();   // Re lam * tau          (N=1)
};

struct AsymptoticsReport {
    int dim = 0;
    double c0_ref = std::numeric_limits<double>::quiet_NaN();       // m2 / (2 int w0^2)
    double re_limit_ref = std::numeric_limits<double>::quiet_NaN(); // 4 int w0^2 / m2 - 1
    double im_limit_ref = std::numeric_limits<double>::quiet_NaN(); // sqrt(2)
    std::vector<AsymptoticsEntry> entries;
    // invisible-mode diagnostic: eigenfunctions orthogonal to both w and w^2
    // coincide with radial modes of L0; no such mode sits in the right
    // half-plane when mu_next < 0 and phi0 projects onto w^2
    double mu0 = 0.0;
    double mu_next = 0.0;
    double w2_projection = 0.0;
    bool no_invisible_rhp_mode = false;
};

inline AsymptoticsReport asymptotic_checks(const NlepProblem& p,
                                           const std::vector<double>& tau_grid) {
    if (tau_grid.empty())
        throw grid_error("asymptotic_checks: missing branch data (empty tau grid)");
    for (double t : tau_grid)
        if (!(t > 0.0)) throw grid_error("asymptotic_checks: tau grid must be positive");
    AsymptoticsReport rep;
    rep.dim = p.dim();
    if (rep.dim == 2) rep.c0_ref = p.gs_c0();
    if (rep.dim == 1) {
        rep.re_limit_ref = p.gs_re_limit();
        rep.im_limit_ref = std::sqrt(2.0);
    }
    for (double tau : tau_grid) {
        NlepProblem q(p);
        q.set_tau_tilde(tau);
        const Complex lam = find_eigenvalue(q, asymptotic_seed(p, tau));
        AsymptoticsEntry e;
        e.tau_tilde = tau;
        e.lambda = lam;
        e.abs_F = std::abs(q.characteristic(lam));
        if (rep.dim == 2) {
            e.mod_ratio = std::pow(std::abs(lam), 3) * tau / rep.c0_ref;
            e.arg_error = std::arg(lam) - std::numbers::pi / 3.0;
        } else {
            e.im_scaled = lam.imag() * std::sqrt(tau);
            e.re_scaled = lam.real() * tau;
        }
        rep.entries.push_back(e);
    }
    const RadialSpectrum sp = p.op().radial_spectrum();
    rep.mu0 = sp.mu0;
    rep.mu_next = sp.mu_next;
    rep.w2_projection = sp.w2_projection;
    rep.no_invisible_rhp_mode = (sp.mu_next < 0.0) && (std::abs(sp.w2_projection) > 1e-10 * p.m2());
    return rep;
}

} // namespace hotspot

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <thread>

#include "hotspot/ground_state.hpp"
#include "hotspot/linearized_operator.hpp"
#include "hotspot/nlep.hpp"

using namespace hotspot;
using Catch::Approx;

namespace {

struct Setup {
    GroundState gs;
    LinearizedOperator op;
    static Setup make(int dim, int n = 4000) {
        GroundState gs = make_ground_state(dim, n);
        LinearizedOperator op = LinearizedOperator::assemble(gs);
        return {std::move(gs), std::move(op)};
    }
};

const double kPi = std::numbers::pi;
// large-tau limit of Re(lambda) tau in 1D: 4 int w0^2 / int w^2 - 1,
// in closed form (pi^2 - 24)/36
const double kReLimit1D = (kPi * kPi - 24.0) / 36.0;

} // namespace

TEST_CASE("F(0) = 1/2 for every tau_tilde, both dimensions") {
    for (int dim : {1, 2}) {
        Setup s = Setup::make(dim);
        for (double tt : {0.0, 1.0, 1e3}) {
            NlepProblem p(s.gs, s.op, tt);
            const Complex F0 = p.characteristic({0.0, 0.0});
            INFO("dim " << dim << " tau " << tt);
            REQUIRE(std::abs(F0 - Complex{0.5, 0.0}) < 1e-10);
        }
    }
}

TEST_CASE("conjugate symmetry of the characteristic function") {
    Setup s = Setup::make(1, 2000);
    NlepProblem p(s.gs, s.op, 7.5);
    for (Complex lam : {Complex{0.1, 0.8}, Complex{0.02, -1.3}, Complex{1.9, 2.2}}) {
        const Complex a = p.characteristic(lam);
        const Complex b = p.characteristic(std::conj(lam));
        REQUIRE(a.real() == b.real());
        REQUIRE(a.imag() == -b.imag());
    }
}

TEST_CASE("pole guards") {
    Setup s = Setup::make(1, 1000);
    NlepProblem p(s.gs, s.op, 2.0);
    REQUIRE_THROWS_AS(p.characteristic({-0.5, 0.0}), pole_error);   // lambda = -1/tau
    REQUIRE_THROWS_AS(NlepProblem(s.gs, s.op, -1.0), grid_error);
}

TEST_CASE("1D asymptotic seed is a near-root") {
    Setup s = Setup::make(1);
    for (double tt : {1e3, 1e4}) {
        NlepProblem p(s.gs, s.op, tt);
        const Complex seed{0.0, std::sqrt(2.0 / tt)};
        REQUIRE(std::abs(p.characteristic(seed)) < 1e-2);
    }
}

TEST_CASE("find_eigenvalue") {
    SECTION("2D large tau root has positive real part") {
        Setup s = Setup::make(2);
        NlepProblem p(s.gs, s.op, 1e4);
        const Complex lam = find_eigenvalue(p, asymptotic_seed(p, 1e4));
        REQUIRE(lam.real() > 0.0);
        REQUIRE(std::abs(p.characteristic(lam)) < 1e-10);
    }
    SECTION("1D large tau root has negative real part") {
        Setup s = Setup::make(1);
        NlepProblem p(s.gs, s.op, 1e4);
        const Complex lam = find_eigenvalue(p, asymptotic_seed(p, 1e4));
        REQUIRE(lam.real() < 0.0);
        REQUIRE(std::abs(p.characteristic(lam)) < 1e-10);
    }
    SECTION("conjugate seed converges to the conjugate root") {
        Setup s = Setup::make(2);
        NlepProblem p(s.gs, s.op, 1e3);
        const Complex lam = find_eigenvalue(p, asymptotic_seed(p, 1e3));
        const Complex conj = find_eigenvalue(p, std::conj(asymptotic_seed(p, 1e3)));
        REQUIRE(conj.real() == Approx(lam.real()).margin(1e-9));
        REQUIRE(conj.imag() == Approx(-lam.imag()).margin(1e-9));
    }
}

TEST_CASE("branch scans") {
    SECTION("2D branch crosses the axis exactly once") {
        Setup s = Setup::make(2);
        NlepProblem p(s.gs, s.op, 1.0);
        // track upward from tau=1 (stable side, seeded by continuation from
        // the asymptotic end is done in find_hopf; here seed via a root at 1)
        NlepProblem phi(s.gs, s.op, 1e4);
        const Complex top = find_eigenvalue(phi, asymptotic_seed(phi, 1e4));
        EigenBranch down = scan_branch(phi, 1e4, 1.0, 100, top);
        REQUIRE_FALSE(down.aborted);
        REQUIRE(down.re_sign_changes == 1);
        // endpoints cross-checked by the census
        REQUIRE(count_unstable(NlepProblem(s.gs, s.op, 1.0),
                               {1e-3, 11.0, -5.0, 5.0}) == 0);
        REQUIRE(count_unstable(NlepProblem(s.gs, s.op, 1e4),
                               {1e-3, 11.0, -5.0, 5.0}) == 2);
    }
    SECTION("1D branch stays in the left half-plane") {
        Setup s = Setup::make(1);
        NlepProblem p(s.gs, s.op, 1.0);
        NlepProblem top(s.gs, s.op, 1e4);
        const Complex seed = find_eigenvalue(top, asymptotic_seed(top, 1e4));
        EigenBranch br = scan_branch(top, 1e4, 1.0, 100, seed);
        REQUIRE_FALSE(br.aborted);
        REQUIRE(br.re_sign_changes == 0);
        for (const auto& pt : br.points) REQUIRE(pt.lambda.real() < 0.0);
    }
    SECTION("degenerate range gives a single point") {
        Setup s = Setup::make(1, 2000);
        NlepProblem p(s.gs, s.op, 100.0);
        const Complex direct = find_eigenvalue(p, asymptotic_seed(p, 100.0));
        EigenBranch br = scan_branch(p, 100.0, 100.0, 10, asymptotic_seed(p, 100.0));
        REQUIRE(br.points.size() == 1);
        REQUIRE(br.points[0].lambda.real() == Approx(direct.real()).margin(1e-12));
    }
    SECTION("branch points obey the root tolerance and the step bound") {
        Setup s = Setup::make(1, 2000);
        NlepProblem p(s.gs, s.op, 1.0);
        NlepProblem top(s.gs, s.op, 1e3);
        EigenBranch br = scan_branch(top, 1e3, 1.0, 40,
                                     find_eigenvalue(top, asymptotic_seed(top, 1e3)));
        REQUIRE_FALSE(br.aborted);
        for (size_t i = 0; i < br.points.size(); ++i) {
            REQUIRE(br.points[i].abs_F < 1e-10);
            if (i > 0) {
                const Complex prev = br.points[i - 1].lambda;
                REQUIRE(std::abs(br.points[i].lambda - prev) <= 0.5 * (1.0 + std::abs(prev)));
            }
        }
    }
}

TEST_CASE("roots of F solve the full nonlocal eigenvalue equation") {
    // independent of the scalar reduction: build the eigenfunction
    // phi = (L0 - lambda)^{-1} w^3 and evaluate the nonlocal operator directly
    for (int dim : {1, 2}) {
        Setup s = Setup::make(dim);
        const double tt = (dim == 1) ? 50.0 : 300.0;
        NlepProblem p(s.gs, s.op, tt);
        const Complex lam = find_eigenvalue(p, asymptotic_seed(p, tt));
        const auto& w = s.op.profile();
        const RadialGrid& g = s.op.grid();
        const int n = g.n;
        std::vector<double> w3(n + 1);
        for (int i = 0; i <= n; ++i) w3[i] = w[i] * w[i] * w[i];
        const auto phi = s.op.resolve_shifted(lam, w3);

        // nonlocal coefficients from the weighted inner products
        Complex w2phi{0.0, 0.0}, wphi{0.0, 0.0};
        double phimax = 0.0;
        for (int i = 0; i <= n; ++i) {
            w2phi += g.vol[i] * w[i] * w[i] * phi[i];
            wphi += g.vol[i] * w[i] * phi[i];
            phimax = std::max(phimax, std::abs(phi[i]));
        }
        const Complex ttl = tt * lam;
        const Complex c = 3.0 / (1.0 + ttl) * w2phi / p.m3() +
                          2.0 * ttl / (1.0 + ttl) * wphi / p.m2();

        // L0 phi - c w^3 - lambda phi, evaluated row by row
        double resid = 0.0;
        const auto& sub = s.op.row_sub();
        const auto& dia = s.op.row_diag();
        const auto& sup = s.op.row_sup();
        for (int i = 0; i < n; ++i) {
            Complex v = dia[i] * phi[i];
            if (i > 0) v += sub[i] * phi[i - 1];
            if (i < n - 1) v += sup[i] * phi[i + 1];
            v -= c * w3[i] + lam * phi[i];
            resid = std::max(resid, std::abs(v));
        }
        INFO("dim " << dim << " residual " << resid << " phimax " << phimax);
        REQUIRE(resid < 1e-8 * phimax);
    }
}

TEST_CASE("mismatched grids are rejected") {
    Setup a = Setup::make(1, 1000);
    Setup b = Setup::make(1, 1200);
    REQUIRE_THROWS_AS(NlepProblem(a.gs, b.op, 1.0), grid_error);
}

TEST_CASE("concurrent characteristic evaluations match serial ones") {
    Setup s = Setup::make(1, 2000);
    NlepProblem p(s.gs, s.op, 10.0);
    const std::vector<Complex> points{{0.1, 0.4}, {0.5, -1.0}, {1.2, 0.2}, {0.05, 2.0}};
    std::vector<Complex> serial(points.size());
    for (size_t i = 0; i < points.size(); ++i) serial[i] = p.characteristic(points[i]);
    std::vector<Complex> parallel(points.size());
    {
        std::vector<std::thread> pool;
        for (size_t i = 0; i < points.size(); ++i)
            pool.emplace_back([&, i] { parallel[i] = p.characteristic(points[i]); });
        for (auto& t : pool) t.join();
    }
    for (size_t i = 0; i < points.size(); ++i) REQUIRE(parallel[i] == serial[i]);
}

TEST_CASE("count_unstable") {
    SECTION("census values") {
        Setup s2 = Setup::make(2);
        NlepProblem p2(s2.gs, s2.op, 1e4);
        REQUIRE(count_unstable(p2, {1e-3, 1.0, -1.0, 1.0}) == 2);
        Setup s1 = Setup::make(1);
        NlepProblem p1(s1.gs, s1.op, 1e4);
        const double mu0 = s1.op.radial_spectrum().mu0;
        REQUIRE(count_unstable(p1, {1e-3, 2.0 * mu0, -5.0, 5.0}) == 0);
    }
    SECTION("zero-area rectangle") {
        Setup s = Setup::make(1, 1000);
        NlepProblem p(s.gs, s.op, 1.0);
        REQUIRE(count_unstable(p, {0.5, 0.5, -1.0, 1.0}) == 0);
    }
    SECTION("left half-plane rectangles are rejected") {
        Setup s = Setup::make(1, 1000);
        NlepProblem p(s.gs, s.op, 1.0);
        REQUIRE_THROWS_AS(count_unstable(p, {-1.0, 1.0, -1.0, 1.0}), grid_error);
    }
    SECTION("small tau stability in both dimensions") {
        for (int dim : {1, 2}) {
            Setup s = Setup::make(dim);
            NlepProblem p(s.gs, s.op, 1e-3);
            const double mu0 = s.op.radial_spectrum().mu0;
            REQUIRE(count_unstable(p, {1e-3, 2.0 * mu0, -5.0, 5.0}) == 0);
        }
    }
    SECTION("tau = 0: no right-half-plane root at all") {
        for (int dim : {1, 2}) {
            Setup s = Setup::make(dim);
            NlepProblem p(s.gs, s.op, 0.0);
            const double mu0 = s.op.radial_spectrum().mu0;
            REQUIRE(count_unstable(p, {1e-3, 2.0 * mu0, -5.0, 5.0}) == 0);
        }
    }
}

TEST_CASE("Hopf bifurcation") {
    SECTION("2D crossing found and census flips") {
        Setup s = Setup::make(2);
        NlepProblem p(s.gs, s.op, 1.0);
        HopfResult h = find_hopf(p, 0.2, 50.0);
        REQUIRE(h.tau_h == Approx(1.13871).margin(5e-3));
        REQUIRE(std::abs(h.lambda_h.real()) < 1e-8);
        REQUIRE(h.lambda_h.imag() == Approx(1.85178).margin(5e-3));
        const double mu0 = s.op.radial_spectrum().mu0;
        REQUIRE(count_unstable(NlepProblem(s.gs, s.op, 0.8 * h.tau_h),
                               {1e-3, 2.0 * mu0, -5.0, 5.0}) == 0);
        REQUIRE(count_unstable(NlepProblem(s.gs, s.op, 1.25 * h.tau_h),
                               {1e-3, 2.0 * mu0, -5.0, 5.0}) == 2);
    }
    SECTION("1D bracket is invalid (no crossing)") {
        Setup s = Setup::make(1);
        NlepProblem p(s.gs, s.op, 1.0);
        REQUIRE_THROWS_AS(find_hopf(p, 0.2, 1e4), bracket_error);
    }
    SECTION("grid refinement moves tau_h by less than 1%") {
        Setup coarse = Setup::make(2, 2000);
        Setup fine = Setup::make(2, 4000);
        HopfResult hc = find_hopf(NlepProblem(coarse.gs, coarse.op, 1.0), 0.3, 20.0);
        HopfResult hf = find_hopf(NlepProblem(fine.gs, fine.op, 1.0), 0.3, 20.0);
        REQUIRE(std::abs(hc.tau_h - hf.tau_h) / hf.tau_h < 1e-2);
    }
}

TEST_CASE("asymptotic checks against the moment formulas") {
    SECTION("1D") {
        Setup s = Setup::make(1);
        NlepProblem p(s.gs, s.op, 1.0);
        AsymptoticsReport rep = asymptotic_checks(p, {1e2, 1e3, 1e4});
        REQUIRE(rep.re_limit_ref == Approx(kReLimit1D).margin(1e-4));
        const auto& last = rep.entries.back();
        REQUIRE(last.im_scaled == Approx(std::sqrt(2.0)).epsilon(1e-3));
        REQUIRE(last.re_scaled == Approx(rep.re_limit_ref).margin(1e-3));
        REQUIRE(last.re_scaled == Approx(kReLimit1D).margin(1e-3));
        REQUIRE(rep.no_invisible_rhp_mode);
    }
    SECTION("2D") {
        Setup s = Setup::make(2);
        NlepProblem p(s.gs, s.op, 1.0);
        AsymptoticsReport rep = asymptotic_checks(p, {1e2, 1e3, 1e4});
        const auto& last = rep.entries.back();
        REQUIRE(last.mod_ratio == Approx(1.0).margin(0.1));
        REQUIRE(std::abs(last.arg_error) < 0.05);
        // the ratio tightens as tau grows
        REQUIRE(std::abs(rep.entries[2].mod_ratio - 1.0) <
                std::abs(rep.entries[0].mod_ratio - 1.0));
        REQUIRE(rep.no_invisible_rhp_mode);
    }
    SECTION("empty grid is an error") {
        Setup s = Setup::make(1, 1000);
        NlepProblem p(s.gs, s.op, 1.0);
        REQUIRE_THROWS_AS(asymptotic_checks(p, {}), grid_error);
    }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "hotspot/ground_state.hpp"
#include "hotspot/linearized_operator.hpp"

using namespace hotspot;
using Catch::Approx;

namespace {

// fixed-seed smooth grid functions vanishing at L: sums of Gaussian bumps
std::vector<double> random_smooth(const RadialGrid& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> f(g.n + 1, 0.0);
    for (int b = 0; b < 5; ++b) {
        const double c = u(rng) * g.length * 0.5;
        const double s = 0.5 + 2.0 * u(rng);
        const double a = 2.0 * u(rng) - 1.0;
        for (int i = 0; i <= g.n; ++i) {
            const double z = (g.r[i] - c) / s;
            f[i] += a * std::exp(-z * z);
        }
    }
    const double taper = f[g.n];
    for (int i = 0; i <= g.n; ++i) f[i] -= taper * (g.r[i] / g.length) * (g.r[i] / g.length);
    f[g.n] = 0.0;
    return f;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// test-side oracle: Jacobi eigenvalues of the dense symmetrized operator
std::vector<double> jacobi_eigenvalues(const LinearizedOperator& op) {
    const RadialGrid& g = op.grid();
    const int n = g.n;
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        A[i][i] = op.row_diag()[i];
        if (i > 0) {
            const double t = std::sqrt(op.row_sub()[i] * op.row_sup()[i - 1]);
            A[i][i - 1] = A[i - 1][i] = t;
        }
    }
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) off += A[p][q] * A[p][q];
        if (off < 1e-20) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(A[p][q]) < 1e-14) continue;
                const double theta = 0.5 * (A[q][q] - A[p][p]) / A[p][q];
                const double t = ((theta >= 0) ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A[k][p], akq = A[k][q];
                    A[k][p] = c * akp - s * akq;
                    A[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A[p][k], aqk = A[q][k];
                    A[p][k] = c * apk - s * aqk;
                    A[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eigs(n);
    for (int i = 0; i < n; ++i) eigs[i] = A[i][i];
    std::sort(eigs.begin(), eigs.end(), std::greater<double>());
    return eigs;
}

} // namespace

TEST_CASE("operator identities on the polished profile") {
    for (int dim : {1, 2}) {
        GroundState gs = make_ground_state(dim);
        LinearizedOperator op = LinearizedOperator::assemble(gs);
        const auto& w = op.profile();
        const int n = op.grid().n;

        // L0 w = 2 w^3 transfers at solver tolerance
        std::vector<double> img = op.apply(w);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(img[i] - 2.0 * w[i] * w[i] * w[i]));
        REQUIRE(worst < 1e-9);

        // L0 w0 = w at discretization order; skip the last cells where the
        // Dirichlet cutoff of w0 (which decays a factor r slower than w)
        // enters the row directly
        std::vector<double> w0 = detail::central_derivative(op.grid(), w);
        for (int i = 0; i <= n; ++i) w0[i] = 0.5 * w[i] + 0.5 * op.grid().r[i] * w0[i];
        std::vector<double> img0 = op.apply(w0);
        worst = 0.0;
        for (int i = 0; i < n; ++i)
            if (op.grid().r[i] <= op.grid().length - 2.0)
                worst = std::max(worst, std::abs(img0[i] - w[i]));
        REQUIRE(worst < 1e-3);

        // linearity / zero
        std::vector<double> zero(n + 1, 0.0);
        REQUIRE(max_abs(op.apply(zero)) == 0.0);
    }
}

TEST_CASE("resolvent oracles at lambda = 0") {
    for (int dim : {1, 2}) {
        GroundState gs = make_ground_state(dim);
        LinearizedOperator op = LinearizedOperator::assemble(gs);
        const auto& w = op.profile();
        const int n = op.grid().n;
        std::vector<double> w3(n + 1);
        for (int i = 0; i <= n; ++i) w3[i] = w[i] * w[i] * w[i];

        auto psi = op.resolve_shifted({0.0, 0.0}, w3);
        double worst = 0.0;
        for (int i = 0; i <= n; ++i) worst = std::max(worst, std::abs(psi[i].real() - 0.5 * w[i]));
        REQUIRE(worst / (0.5 * w[0]) < 1e-11);

        auto psi0 = op.resolve_shifted({0.0, 0.0}, std::span<const double>(w));
        std::vector<double> w0 = detail::central_derivative(op.grid(), w);
        for (int i = 0; i <= n; ++i) w0[i] = 0.5 * w[i] + 0.5 * op.grid().r[i] * w0[i];
        worst = 0.0;
        for (int i = 0; i <= n; ++i) worst = std::max(worst, std::abs(psi0[i].real() - w0[i]));
        REQUIRE(worst / max_abs(w0) < 1e-4);
    }
}

TEST_CASE("zero right-hand side and trivial shifts") {
    GroundState gs = make_ground_state(1, 1000);
    LinearizedOperator op = LinearizedOperator::assemble(gs);
    std::vector<std::complex<double>> zero(op.grid().n + 1, {0.0, 0.0});
    auto x = op.resolve_shifted({1.0, 0.0}, zero);
    for (const auto& v : x) REQUIRE(std::abs(v) == 0.0);
}

TEST_CASE("resolvent identity on random smooth functions") {
    GroundState gs = make_ground_state(1, 2000);
    LinearizedOperator op = LinearizedOperator::assemble(gs);
    for (unsigned seed : {11u, 12u, 13u}) {
        std::vector<double> phi = random_smooth(op.grid(), seed);
        for (std::complex<double> lam : {std::complex<double>{0.7, 0.0},
                                         std::complex<double>{0.2, 1.1},
                                         std::complex<double>{-2.0, 0.4}}) {
            std::vector<std::complex<double>> rhs(op.grid().n + 1);
            std::vector<double> img = op.apply(phi);
            for (int i = 0; i <= op.grid().n; ++i) rhs[i] = img[i] - lam * phi[i];
            auto back = op.resolve_shifted(lam, rhs);
            double worst = 0.0;
            for (int i = 0; i <= op.grid().n; ++i)
                worst = std::max(worst, std::abs(back[i] - phi[i]));
            REQUIRE(worst < 1e-8 * (1.0 + max_abs(phi)));
        }
    }
}

TEST_CASE("self-adjointness in the cell-volume inner product") {
    for (int dim : {1, 2}) {
        GroundState gs = make_ground_state(dim, 2000);
        LinearizedOperator op = LinearizedOperator::assemble(gs);
        std::vector<double> phi = random_smooth(op.grid(), 21);
        std::vector<double> psi = random_smooth(op.grid(), 22);
        const double a = inner(op.grid(), op.apply(phi), psi);
        const double b = inner(op.grid(), phi, op.apply(psi));
        REQUIRE(a == Approx(b).margin(1e-10 * (1.0 + std::abs(a))));
    }
}

TEST_CASE("radial spectrum") {
    SECTION("1D: principal eigenvalue is the Poeschl-Teller value 3") {
        GroundState gs = make_ground_state(1);
        LinearizedOperator op = LinearizedOperator::assemble(gs);
        RadialSpectrum sp = op.radial_spectrum();
        REQUIRE(sp.mu0 == Approx(3.0).margin(1e-4));
        REQUIRE(sp.mu_next < 0.0);
        REQUIRE(sp.w2_projection > 0.0);
        for (int i = 0; i < op.grid().n; ++i) REQUIRE(sp.phi0[i] > -1e-10);
    }
    SECTION("2D principal eigenvalue frozen from the dense oracle") {
        GroundState gs = make_ground_state(2);
        LinearizedOperator op = LinearizedOperator::assemble(gs);
        RadialSpectrum sp = op.radial_spectrum();
        REQUIRE(sp.mu0 == Approx(5.4122).margin(2e-3));
        REQUIRE(sp.mu_next < 0.0);
    }
    SECTION("dense Jacobi oracle at n = 300") {
        GroundState gs = make_ground_state(1, 300);
        LinearizedOperator op = LinearizedOperator::assemble(gs);
        RadialSpectrum sp = op.radial_spectrum();
        std::vector<double> eigs = jacobi_eigenvalues(op);
        REQUIRE(sp.mu0 == Approx(eigs[0]).margin(1e-8));
        REQUIRE(sp.mu_next == Approx(eigs[1]).margin(1e-8));
        REQUIRE(eigs[1] < 0.0);
    }
    SECTION("free operator: spectrum tops out near -1") {
        RadialGrid g = RadialGrid::make(1, 1000, 20.0);
        std::vector<double> pot(g.n, 0.0);
        LinearizedOperator op = LinearizedOperator::from_potential(g, pot);
        RadialSpectrum sp = op.radial_spectrum();
        // leftover cosine mode of the truncated interval sits at -1 - (pi/2L)^2
        const double expect = -1.0 - std::pow(std::numbers::pi / 40.0, 2);
        REQUIRE(sp.mu0 == Approx(expect).margin(1e-5));
        REQUIRE(sp.mu0 >= -1.01);
    }
}

TEST_CASE("shift at the spectrum is signalled") {
    GroundState gs = make_ground_state(1, 1000);
    LinearizedOperator op = LinearizedOperator::assemble(gs);
    RadialSpectrum sp = op.radial_spectrum();
    std::vector<double> w3(op.grid().n + 1);
    for (int i = 0; i <= op.grid().n; ++i) w3[i] = std::pow(op.profile()[i], 3);
    REQUIRE_THROWS_AS(op.resolve_shifted({sp.mu0, 0.0}, std::span<const double>(w3)),
                      shift_at_spectrum);
}

TEST_CASE("grid mismatch is rejected") {
    GroundState gs = make_ground_state(1, 1000);
    LinearizedOperator op = LinearizedOperator::assemble(gs);
    std::vector<double> wrong(17, 1.0);
    REQUIRE_THROWS_AS(op.apply(wrong), grid_error);
}

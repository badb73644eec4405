#pragma once

// Discrete radial linearized operator  L0 phi = Delta phi - phi + 3 w^2 phi
// on the finite-volume grid, with symmetry (Neumann) closure at r = 0 and a
// Dirichlet cutoff at r = L.  The rows are exactly self-adjoint in the cell
// volume inner product.  The potential uses a profile polished onto the
// discrete equation Delta_h w - w + w^3 = 0, so the identities
//   L0 w = 2 w^3   and   L0 w0 = w
// transfer to the matrix at solver tolerance rather than discretization order.

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "hotspot/errors.hpp"
#include "hotspot/ground_state.hpp"
#include "hotspot/radial_grid.hpp"
#include "hotspot/tridiag.hpp"

namespace hotspot {

struct RadialSpectrum {
    double mu0 = 0.0;              // principal radial eigenvalue
    std::vector<double> phi0;      // positive eigenfunction, unit weighted norm
    double mu_next = 0.0;          // next radial eigenvalue
    double w2_projection = 0.0;    // <w^2, phi0> in the weighted inner product
};

class LinearizedOperator {
public:
    static constexpr double kPivotThreshold = 1e-12;

    static LinearizedOperator assemble(const GroundState& gs, double polish_target = 1e-13) {
        LinearizedOperator op;
        op.grid_ = gs.grid;
        op.w_ = gs.w;
        detail::polish_profile(op.grid_, op.w_, polish_target);
        std::vector<double> pot(op.grid_.n);
        for (int i = 0; i < op.grid_.n; ++i) pot[i] = -1.0 + 3.0 * op.w_[i] * op.w_[i];
        detail::assemble_rows(op.grid_, pot, op.sub_, op.diag_, op.sup_);
        return op;
    }

    // raw assembly from an explicit potential (diagnostics / free-operator checks)
    static LinearizedOperator from_potential(const RadialGrid& grid, std::span<const double> pot) {
        if (static_cast<int>(pot.size()) < grid.n)
            throw grid_error("LinearizedOperator: potential too short");
        LinearizedOperator op;
        op.grid_ = grid;
        op.w_.assign(grid.n + 1, 0.0);
        std::vector<double> shifted(grid.n);
        for (int i = 0; i < grid.n; ++i) shifted[i] = -1.0 + pot[i];
        detail::assemble_rows(op.grid_, shifted, op.sub_, op.diag_, op.sup_);
        return op;
    }

    const RadialGrid& grid() const { return grid_; }
    const std::vector<double>& profile() const { return w_; }

    // image of a grid function vanishing at r = L; output[n] = 0
    std::vector<double> apply(std::span<const double> phi) const {
        if (static_cast<int>(phi.size()) != grid_.n + 1)
            throw grid_error("LinearizedOperator::apply: grid mismatch");
        const int n = grid_.n;
        std::vector<double> out(n + 1, 0.0);
        for (int i = 0; i < n; ++i) {
            double s = diag_[i] * phi[i];
            if (i > 0) s += sub_[i] * phi[i - 1];
            if (i < n - 1) s += sup_[i] * phi[i + 1];
            out[i] = s;
        }
        return out;
    }

    // solve (L0 - lambda) psi = rhs; complex tridiagonal elimination with
    // partial pivoting and one refinement pass
    std::vector<std::complex<double>> resolve_shifted(std::complex<double> lambda,
                                                      std::span<const std::complex<double>> rhs) const {
        if (static_cast<int>(rhs.size()) != grid_.n + 1)
            throw grid_error("LinearizedOperator::resolve_shifted: grid mismatch");
        const int n = grid_.n;
        std::vector<std::complex<double>> sub(n), diag(n), sup(n);
        for (int i = 0; i < n; ++i) {
            sub[i] = sub_[i];
            diag[i] = diag_[i] - lambda;
            sup[i] = sup_[i];
        }
        TridiagLU<std::complex<double>> lu(sub, diag, sup);
        if (lu.min_relative_pivot() < kPivotThreshold)
            throw shift_at_spectrum("resolve_shifted: shift at spectrum (relative pivot " +
                                    std::to_string(lu.min_relative_pivot()) + ")");
        std::vector<std::complex<double>> x(rhs.begin(), rhs.begin() + n);
        lu.solve_in_place(x);

        double rhs_norm = 0.0, row_scale = 0.0;
        for (int i = 0; i < n; ++i) {
            rhs_norm = std::max(rhs_norm, std::abs(rhs[i]));
            row_scale = std::max(row_scale,
                                 std::abs(diag[i]) + std::abs(sub[i]) + std::abs(sup[i]));
        }
        auto residual = [&]() {
            double rn = 0.0;
            for (int i = 0; i < n; ++i) {
                std::complex<double> s = diag[i] * x[i];
                if (i > 0) s += sub[i] * x[i - 1];
                if (i < n - 1) s += sup[i] * x[i + 1];
                rn = std::max(rn, std::abs(s - rhs[i]));
            }
            return rn;
        };
        auto x_norm = [&]() {
            double m = 0.0;
            for (int i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
            return m;
        };
        // resolvent amplification bound: the physical eigenvalues are O(1)
        // spaced, so a blow-up of x/rhs means the shift sits essentially on
        // the spectrum even when every pivot stayed above threshold
        if (x_norm() > 1e8 * (rhs_norm + 1e-300))
            throw shift_at_spectrum("resolve_shifted: resolvent amplification exceeds 1e8");
        // 1e-10 relative contract plus the floor below which the residual
        // cannot even be evaluated in double precision
        auto threshold = [&]() {
            return 1e-10 * rhs_norm + 8.0 * 2.2e-16 * row_scale * x_norm();
        };
        if (residual() > threshold()) {
            std::vector<std::complex<double>> r(n);
            for (int i = 0; i < n; ++i) {
                std::complex<double> s = diag[i] * x[i];
                if (i > 0) s += sub[i] * x[i - 1];
                if (i < n - 1) s += sup[i] * x[i + 1];
                r[i] = rhs[i] - s;
            }
            lu.solve_in_place(r);
            for (int i = 0; i < n; ++i) x[i] += r[i];
            if (residual() > threshold())
                throw shift_at_spectrum("resolve_shifted: residual stagnates; shift near spectrum");
        }
        x.push_back({0.0, 0.0});
        return x;
    }

    std::vector<std::complex<double>> resolve_shifted(std::complex<double> lambda,
                                                      std::span<const double> rhs) const {
        std::vector<std::complex<double>> crhs(rhs.size());
        for (size_t i = 0; i < rhs.size(); ++i) crhs[i] = rhs[i];
        return resolve_shifted(lambda, crhs);
    }

    // number of eigenvalues below x (Sturm count on the similar symmetric matrix)
    int eigenvalues_below(double x) const {
        const int n = grid_.n;
        int cnt = 0;
        double q = diag_[0] - x;
        if (q < 0) ++cnt;
        for (int i = 1; i < n; ++i) {
            const double t2 = sub_[i] * sup_[i - 1];
            if (q == 0.0) q = 1e-300;
            q = diag_[i] - x - t2 / q;
            if (q < 0) ++cnt;
        }
        return cnt;
    }

    RadialSpectrum radial_spectrum(double tol = 1e-12, int max_iter = 200) const {
        RadialSpectrum sp;
        const double hi = gershgorin_upper() + 1.0;
        const double lo = gershgorin_lower() - 1.0;
        const int total = eigenvalues_below(hi);
        sp.mu0 = bisect_eigenvalue(total - 1, lo, hi);
        sp.phi0 = inverse_iterate(sp.mu0, {}, tol, max_iter, &sp.mu0);
        // make phi0 positive; the principal eigenfunction has one sign
        double mass = 0.0;
        for (int i = 0; i <= grid_.n; ++i) mass += grid_.vol[i] * sp.phi0[i];
        if (mass < 0) for (double& v : sp.phi0) v = -v;
        sp.mu_next = bisect_eigenvalue(total - 2, lo, hi);
        (void)inverse_iterate(sp.mu_next, sp.phi0, tol, max_iter, &sp.mu_next);
        std::vector<double> w2(grid_.n + 1);
        for (int i = 0; i <= grid_.n; ++i) w2[i] = w_[i] * w_[i];
        sp.w2_projection = inner(grid_, w2, sp.phi0);
        return sp;
    }

    const std::vector<double>& row_sub() const { return sub_; }
    const std::vector<double>& row_diag() const { return diag_; }
    const std::vector<double>& row_sup() const { return sup_; }

private:
    double gershgorin_upper() const {
        double m = -1e300;
        for (int i = 0; i < grid_.n; ++i)
            m = std::max(m, diag_[i] + std::abs(sub_[i]) + std::abs(sup_[i]));
        return m;
    }
    double gershgorin_lower() const {
        double m = 1e300;
        for (int i = 0; i < grid_.n; ++i)
            m = std::min(m, diag_[i] - std::abs(sub_[i]) - std::abs(sup_[i]));
        return m;
    }

    // eigenvalue with exactly k eigenvalues below it (k-th from the bottom, 0-based)
    double bisect_eigenvalue(int k, double lo, double hi) const {
        for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (eigenvalues_below(mid) <= k) lo = mid; else hi = mid;
        }
        return 0.5 * (lo + hi);
    }

    // plain factor-and-solve for the inverse iteration; no residual demand,
    // the shift is deliberately close to the spectrum
    std::vector<double> raw_shifted_solve(double shift, std::span<const double> rhs) const {
        const int n = grid_.n;
        std::vector<double> diag(n);
        for (int i = 0; i < n; ++i) diag[i] = diag_[i] - shift;
        TridiagLU<double> lu(sub_, diag, sup_);
        if (lu.min_relative_pivot() < 1e-15)
            throw shift_at_spectrum("raw_shifted_solve: exactly singular");
        std::vector<double> x(rhs.begin(), rhs.begin() + n);
        lu.solve_in_place(x);
        x.push_back(0.0);
        return x;
    }

    // shifted inverse iteration, optionally deflating a known eigenvector in the
    // weighted inner product; refines the eigenvalue estimate in place
    std::vector<double> inverse_iterate(double mu, const std::vector<double>& deflate,
                                        double tol, int max_iter, double* mu_out) const {
        const int n = grid_.n;
        std::vector<double> v(n + 1, 0.0);
        for (int i = 0; i < n; ++i) v[i] = 1.0 / (1.0 + grid_.r[i]);   // generic start
        auto project = [&](std::vector<double>& x) {
            if (deflate.empty()) return;
            const double c = inner(grid_, x, deflate);
            for (int i = 0; i <= n; ++i) x[i] -= c * deflate[i];
        };
        auto normalize = [&](std::vector<double>& x) {
            const double s = std::sqrt(inner(grid_, x, x));
            if (s == 0.0) throw convergence_error("radial_spectrum: zero iterate");
            for (double& y : x) y /= s;
        };
        project(v);
        normalize(v);
        double shift = mu + 1e-6 * (1.0 + std::abs(mu));
        double mu_prev = mu;
        for (int it = 0; it < max_iter; ++it) {
            std::vector<double> sol;
            try {
                sol = raw_shifted_solve(shift, v);
            } catch (const shift_at_spectrum&) {
                shift += 1e-6 * (1.0 + std::abs(shift));
                continue;
            }
            v = std::move(sol);
            project(v);
            normalize(v);
            std::vector<double> lv = apply(v);
            const double rho = inner(grid_, v, lv);
            double resid = 0.0;
            for (int i = 0; i <= n; ++i) resid = std::max(resid, std::abs(lv[i] - rho * v[i]));
            if (std::abs(rho - mu_prev) < tol * (1.0 + std::abs(rho)) && resid < 1e-9) {
                if (mu_out) *mu_out = rho;
                return v;
            }
            mu_prev = rho;
        }
        throw convergence_error("radial_spectrum: inverse iteration did not converge", mu_prev);
    }

    RadialGrid grid_;
    std::vector<double> w_;
    std::vector<double> sub_, diag_, sup_;
};

} // namespace hotspot

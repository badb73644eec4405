#pragma once

// Tridiagonal LU with partial pivoting (LAPACK gttrf-style, one fill-in
// superdiagonal).  Templated on the scalar so the same elimination serves the
// real assembly and the complex shifted resolvent solves.

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "hotspot/errors.hpp"

namespace hotspot {

template <class T>
class TridiagLU {
public:
    // sub[0] unused; rows i: sub[i] x_{i-1} + diag[i] x_i + sup[i] x_{i+1}
    TridiagLU(std::span<const T> sub, std::span<const T> diag, std::span<const T> sup)
        : n_(static_cast<int>(diag.size())), dl_(n_), d_(n_), du_(n_), du2_(n_, T{}), ipiv_(n_, 0) {
        for (int i = 0; i < n_; ++i) {
            dl_[i] = sub[i];
            d_[i] = diag[i];
            du_[i] = sup[i];
        }
        min_rel_pivot_ = 1.0;
        for (int i = 0; i < n_ - 1; ++i) {
            const double scale = std::abs(d_[i]) + std::abs(du_[i]) + (i > 0 ? std::abs(dl_[i]) : 0.0);
            if (std::abs(d_[i]) >= std::abs(dl_[i + 1])) {
                ipiv_[i] = i;
                if (d_[i] != T{}) {
                    const T m = dl_[i + 1] / d_[i];
                    dl_[i + 1] = m;                     // store multiplier
                    d_[i + 1] -= m * du_[i];
                }
                track_pivot(d_[i], scale);
            } else {
                ipiv_[i] = i + 1;                        // swap rows i, i+1
                const T m = d_[i] / dl_[i + 1];
                d_[i] = dl_[i + 1];
                dl_[i + 1] = m;
                const T tmp = du_[i];
                du_[i] = d_[i + 1];
                d_[i + 1] = tmp - m * d_[i + 1];
                du2_[i] = du_[i + 1];
                du_[i + 1] = -m * du_[i + 1];
                track_pivot(d_[i], std::abs(d_[i]) + std::abs(du_[i]) + std::abs(du2_[i]));
            }
        }
        if (n_ > 0) {
            ipiv_[n_ - 1] = n_ - 1;
            const double scale = std::abs(d_[n_ - 1]) + (n_ > 1 ? std::abs(dl_[n_ - 1]) : 0.0);
            track_pivot(d_[n_ - 1], scale);
        }
    }

    double min_relative_pivot() const { return min_rel_pivot_; }

    void solve_in_place(std::span<T> b) const {
        if (static_cast<int>(b.size()) != n_)
            throw grid_error("TridiagLU::solve: size mismatch");
        for (int i = 0; i < n_ - 1; ++i) {
            if (ipiv_[i] == i) {
                b[i + 1] -= dl_[i + 1] * b[i];
            } else {
                const T tmp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tmp - dl_[i + 1] * b[i];
            }
        }
        b[n_ - 1] /= d_[n_ - 1];
        if (n_ > 1)
            b[n_ - 2] = (b[n_ - 2] - du_[n_ - 2] * b[n_ - 1]) / d_[n_ - 2];
        for (int i = n_ - 3; i >= 0; --i)
            b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
    }

    std::vector<T> solve(std::span<const T> rhs) const {
        std::vector<T> x(rhs.begin(), rhs.end());
        solve_in_place(x);
        return x;
    }

private:
    void track_pivot(const T& piv, double scale) {
        const double rel = (scale > 0.0) ? std::abs(piv) / scale : 0.0;
        if (rel < min_rel_pivot_) min_rel_pivot_ = rel;
    }

    int n_;
    std::vector<T> dl_, d_, du_, du2_;
    std::vector<int> ipiv_;
    double min_rel_pivot_ = 1.0;
};

template <class T>
inline std::vector<T> tridiag_apply(std::span<const T> sub, std::span<const T> diag,
                                    std::span<const T> sup, std::span<const T> x) {
    const int n = static_cast<int>(diag.size());
    std::vector<T> y(n);
    for (int i = 0; i < n; ++i) {
        T s = diag[i] * x[i];
        if (i > 0) s += sub[i] * x[i - 1];
        if (i < n - 1) s += sup[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

} // namespace hotspot

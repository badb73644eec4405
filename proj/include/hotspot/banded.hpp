#pragma once

// General banded LU with partial pivoting (gbtrf-style storage: kl extra rows
// for fill-in).  Used by the coupled steady-state Newton solver, where the
// interleaved (u, v) unknowns give bandwidth 3.

#include <cmath>
#include <span>
#include <vector>

#include "hotspot/errors.hpp"

namespace hotspot {

class BandedMatrix {
public:
    BandedMatrix(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), ab_(static_cast<size_t>(ld_) * n, 0.0) {}

    int size() const { return n_; }

    // valid for j - ku <= i <= j + kl
    double& at(int i, int j) { return ab_[static_cast<size_t>(j) * ld_ + (kl_ + ku_ + i - j)]; }
    double at(int i, int j) const { return ab_[static_cast<size_t>(j) * ld_ + (kl_ + ku_ + i - j)]; }

    void add(int i, int j, double v) {
        if (i < 0 || j < 0 || i >= n_ || j >= n_) throw grid_error("BandedMatrix: index out of range");
        if (j - i > ku_ || i - j > kl_) throw grid_error("BandedMatrix: entry outside band");
        at(i, j) += v;
    }

    std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> y(n_, 0.0);
        for (int j = 0; j < n_; ++j) {
            const int ilo = std::max(0, j - ku_), ihi = std::min(n_ - 1, j + kl_);
            for (int i = ilo; i <= ihi; ++i) y[i] += at(i, j) * x[j];
        }
        return y;
    }

    // in-place factorization; returns false on a numerically singular pivot
    bool factorize() {
        ipiv_.assign(n_, 0);
        const int kv = kl_ + ku_;   // rows 0..kv hold U, below the multipliers
        for (int j = 0; j < n_; ++j) {
            const int lastr = std::min(n_ - 1, j + kl_);
            int p = j;
            double pmax = std::abs(ab_[static_cast<size_t>(j) * ld_ + kv]);
            for (int i = j + 1; i <= lastr; ++i) {
                const double v = std::abs(ab_[static_cast<size_t>(j) * ld_ + kv + (i - j)]);
                if (v > pmax) { pmax = v; p = i; }
            }
            ipiv_[j] = p;
            if (pmax == 0.0) return false;
            const int lastc = std::min(n_ - 1, j + kv);
            if (p != j) {
                for (int c = j; c <= lastc; ++c)
                    std::swap(ab_[static_cast<size_t>(c) * ld_ + kv + (j - c)],
                              ab_[static_cast<size_t>(c) * ld_ + kv + (p - c)]);
            }
            const double piv = ab_[static_cast<size_t>(j) * ld_ + kv];
            for (int i = j + 1; i <= lastr; ++i) {
                double& m = ab_[static_cast<size_t>(j) * ld_ + kv + (i - j)];
                m /= piv;
                for (int c = j + 1; c <= lastc; ++c)
                    ab_[static_cast<size_t>(c) * ld_ + kv + (i - c)] -=
                        m * ab_[static_cast<size_t>(c) * ld_ + kv + (j - c)];
            }
        }
        factored_ = true;
        return true;
    }

    void solve_in_place(std::span<double> b) const {
        if (!factored_) throw std::logic_error("BandedMatrix: solve before factorize");
        const int kv = kl_ + ku_;
        for (int j = 0; j < n_; ++j) {
            if (ipiv_[j] != j) std::swap(b[j], b[ipiv_[j]]);
            const int lastr = std::min(n_ - 1, j + kl_);
            for (int i = j + 1; i <= lastr; ++i)
                b[i] -= ab_[static_cast<size_t>(j) * ld_ + kv + (i - j)] * b[j];
        }
        for (int j = n_ - 1; j >= 0; --j) {
            const int firstc = std::max(0, j - kv);
            double s = b[j];
            for (int c = j + 1; c <= std::min(n_ - 1, j + kv); ++c)
                s -= ab_[static_cast<size_t>(c) * ld_ + kv + (j - c)] * b[c];
            (void)firstc;
            b[j] = s / ab_[static_cast<size_t>(j) * ld_ + kv];
        }
    }

private:
    int n_, kl_, ku_, ld_;
    std::vector<double> ab_;
    std::vector<int> ipiv_;
    bool factored_ = false;
};

} // namespace hotspot

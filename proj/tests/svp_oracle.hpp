#pragma once

#include "sl3/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace sl3::testing {

inline LatticeBasis perturbed_identity(std::mt19937_64& rng, int n, double spread) {
    std::uniform_real_distribution<double> u(-1, 1);
    LatticeBasis b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b.row(i)[j] = (i == j ? 1.0 : 0.0) + spread * u(rng);
    return b;
}

// Gauss-Jordan inverse of a square basis; rows of the result transpose are the dual vectors.
inline std::vector<double> inverse(const LatticeBasis& b) {
    int n = b.rank;
    std::vector<double> a(b.v), inv(size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i) inv[size_t(i) * n + i] = 1;
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[size_t(r) * n + c]) > std::abs(a[size_t(p) * n + c])) p = r;
        for (int k = 0; k < n; ++k) {
            std::swap(a[size_t(c) * n + k], a[size_t(p) * n + k]);
            std::swap(inv[size_t(c) * n + k], inv[size_t(p) * n + k]);
        }
        double piv = a[size_t(c) * n + c];
        for (int k = 0; k < n; ++k) {
            a[size_t(c) * n + k] /= piv;
            inv[size_t(c) * n + k] /= piv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            double f = a[size_t(r) * n + c];
            if (f == 0) continue;
            for (int k = 0; k < n; ++k) {
                a[size_t(r) * n + k] -= f * a[size_t(c) * n + k];
                inv[size_t(r) * n + k] -= f * inv[size_t(c) * n + k];
            }
        }
    }
    return inv;
}

// Brute force over the coefficient box |c_i| <= min(cap, |dual_i| * M), where M is the
// shortest basis row: any vector of length <= M has |c_i| = |<v, dual_i>| <= |dual_i| M.
inline double brute_force_shortest(const LatticeBasis& b, int cap) {
    int n = b.rank;
    std::vector<double> inv = inverse(b);
    double m = INFINITY;
    for (int i = 0; i < n; ++i) m = std::min(m, std::sqrt(b.norm2(i)));
    std::vector<int> bound(n);
    for (int i = 0; i < n; ++i) {
        double d = 0;
        for (int k = 0; k < n; ++k) d += inv[size_t(k) * n + i] * inv[size_t(k) * n + i];
        bound[i] = std::min(cap, int(std::floor(std::sqrt(d) * m + 1e-9)));
    }
    double best = m * m;
    std::vector<double> acc(size_t(n) * (n + 1), 0.0);
    std::function<void(int, bool)> rec = [&](int i, bool nonzero) {
        const double* prev = acc.data() + size_t(i) * n;
        if (i == n) {
            if (!nonzero) return;
            double s = 0;
            for (int k = 0; k < n; ++k) s += prev[k] * prev[k];
            best = std::min(best, s);
            return;
        }
        double* cur = acc.data() + size_t(i + 1) * n;
        for (int c = -bound[i]; c <= bound[i]; ++c) {
            for (int k = 0; k < n; ++k) cur[k] = prev[k] + c * b.row(i)[k];
            rec(i + 1, nonzero || c != 0);
        }
    };
    rec(0, false);
    return std::sqrt(best);
}

}  // namespace sl3::testing

#include "sl3/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sl3 {

using ld = long double;

double LatticeBasis::norm2(int i) const {
    ld s = 0;
    for (int j = 0; j < dim; ++j) s += ld(row(i)[j]) * row(i)[j];
    return double(s);
}

namespace {

struct Gso {
    int n = 0, dim = 0;
    std::vector<ld> b, bstar, mu, bs2;

    explicit Gso(const LatticeBasis& basis) : n(basis.rank), dim(basis.dim) {
        b.resize(size_t(n) * dim);
        for (size_t i = 0; i < b.size(); ++i) b[i] = basis.v[i];
        bstar.resize(b.size());
        mu.assign(size_t(n) * n, 0);
        bs2.assign(n, 0);
        for (int i = 0; i < n; ++i) update_row(i);
    }
    ld* row(int i) { return b.data() + size_t(i) * dim; }
    ld* srow(int i) { return bstar.data() + size_t(i) * dim; }
    ld& m(int i, int j) { return mu[size_t(i) * n + j]; }

    void update_row(int i) {
        ld* bi = row(i);
        ld* si = srow(i);
        for (int c = 0; c < dim; ++c) si[c] = bi[c];
        for (int j = 0; j < i; ++j) {
            const ld* sj = srow(j);
            ld d = 0;
            for (int c = 0; c < dim; ++c) d += bi[c] * sj[c];
            ld mij = bs2[j] > 0 ? d / bs2[j] : 0;
            m(i, j) = mij;
            for (int c = 0; c < dim; ++c) si[c] -= mij * sj[c];
        }
        m(i, i) = 1;
        ld s = 0;
        for (int c = 0; c < dim; ++c) s += si[c] * si[c];
        bs2[i] = s;
    }
};

}  // namespace

LllResult lll_reduce(const LatticeBasis& basis, double delta) {
    if (!(delta > 0.25 && delta < 1)) throw PreconditionError("LLL delta must lie in (0.25, 1)");
    const int n = basis.rank, dim = basis.dim;
    Gso g(basis);
    for (int i = 0; i < n; ++i) {
        ld scale = 0;
        for (int c = 0; c < dim; ++c) scale += g.row(i)[c] * g.row(i)[c];
        if (!(g.bs2[i] > 1e-26L * scale) || scale == 0) throw PreconditionError("rank-deficient lattice basis");
    }
    std::vector<int64_t> t(size_t(n) * n, 0);
    for (int i = 0; i < n; ++i) t[size_t(i) * n + i] = 1;

    auto size_reduce = [&](int k) {
        for (int pass = 0; pass < 4; ++pass) {
            bool changed = false;
            for (int j = k - 1; j >= 0; --j) {
                ld q = std::nearbyint(g.m(k, j));
                if (q == 0) continue;
                if (std::abs(q) > 9.0e15L) throw std::overflow_error("LLL coefficient overflow");
                int64_t qi = int64_t(q);
                changed = true;
                ld* bk = g.row(k);
                const ld* bj = g.row(j);
                for (int c = 0; c < dim; ++c) bk[c] -= q * bj[c];
                for (int c = 0; c < n; ++c) t[size_t(k) * n + c] -= qi * t[size_t(j) * n + c];
                for (int i = 0; i <= j; ++i) g.m(k, i) -= q * g.m(j, i);
            }
            g.update_row(k);
            if (!changed) break;
        }
    };

    int k = 1;
    int64_t guard = 0;
    while (k < n) {
        if (++guard > 2'000'000) throw std::runtime_error("LLL did not converge");
        size_reduce(k);
        ld mk = g.m(k, k - 1);
        if (g.bs2[k] >= (ld(delta) - mk * mk) * g.bs2[k - 1]) {
            ++k;
        } else {
            for (int c = 0; c < dim; ++c) std::swap(g.row(k)[c], g.row(k - 1)[c]);
            for (int c = 0; c < n; ++c) std::swap(t[size_t(k) * n + c], t[size_t(k - 1) * n + c]);
            for (int i = k - 1; i < n; ++i) g.update_row(i);
            k = std::max(k - 1, 1);
        }
    }
    LllResult out{LatticeBasis(n, dim), std::move(t)};
    for (size_t i = 0; i < g.b.size(); ++i) out.basis.v[i] = double(g.b[i]);
    return out;
}

bool lovasz_holds(const LatticeBasis& basis, double delta) {
    Gso g(basis);
    for (int k = 1; k < g.n; ++k) {
        for (int j = 0; j < k; ++j)
            if (std::abs(g.m(k, j)) > 0.5 + 1e-9) return false;
        ld mk = g.m(k, k - 1);
        if (g.bs2[k] < (ld(delta) - mk * mk) * g.bs2[k - 1] * (1 - 1e-12L)) return false;
    }
    return true;
}

void enumerate_ball(const LatticeBasis& basis, double radius,
                    const std::function<void(const std::vector<int64_t>&, double)>& visit,
                    int64_t node_budget) {
    const int n = basis.rank;
    Gso g(basis);
    const ld r2 = ld(radius) * radius * (1 + 1e-9L);
    std::vector<int64_t> x(n, 0);
    std::vector<ld> partial(n + 1, 0);  // partial[i] = squared length of levels >= i
    std::vector<ld> center(n, 0);
    int64_t nodes = 0;

    // iterative DFS over levels n-1 .. 0
    std::vector<int64_t> hi(n, 0);
    int level = n - 1;
    std::vector<char> zero_above(n + 1, 1);
    auto init_level = [&](int i) {
        ld c = 0;
        for (int j = i + 1; j < n; ++j) c -= ld(x[j]) * g.m(j, i);
        center[i] = c;
        ld rem = r2 - partial[i + 1];
        if (rem < 0) rem = 0;
        ld w = std::sqrt(rem / g.bs2[i]);
        int64_t lo = int64_t(std::ceil(c - w - 1e-12L));
        hi[i] = int64_t(std::floor(c + w + 1e-12L));
        if (zero_above[i + 1] && lo < 0) lo = 0;
        x[i] = lo;
    };
    init_level(level);
    for (;;) {
        if (x[level] > hi[level]) {
            ++level;
            if (level >= n) break;
            ++x[level];
            continue;
        }
        if (++nodes > node_budget) throw BudgetExceeded("enumeration node budget exceeded", 0);
        ld d = ld(x[level]) - center[level];
        ld p = partial[level + 1] + d * d * g.bs2[level];
        if (p > r2) {
            // interval bounds are approximate; skip overshoots
            ++x[level];
            continue;
        }
        partial[level] = p;
        zero_above[level] = zero_above[level + 1] && x[level] == 0;
        if (level == 0) {
            if (!zero_above[0]) visit(x, double(p));
            ++x[0];
            continue;
        }
        --level;
        init_level(level);
    }
}

ShortVectorResult shortest_vector(const LatticeBasis& basis, int64_t node_budget) {
    LllResult red = lll_reduce(basis);
    const int n = basis.rank;
    double r2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) r2 = std::min(r2, red.basis.norm2(i));
    double radius = std::sqrt(r2);
    std::vector<int64_t> best_c;
    ld best = std::numeric_limits<ld>::infinity();
    auto exact_norm2 = [&](const std::vector<int64_t>& c) {
        // recompute from the input basis via the transform
        std::vector<int64_t> w(n, 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) w[j] += c[i] * red.transform[size_t(i) * n + j];
        ld s = 0;
        for (int col = 0; col < basis.dim; ++col) {
            ld acc = 0;
            for (int j = 0; j < n; ++j) acc += ld(w[j]) * basis.row(j)[col];
            s += acc * acc;
        }
        return std::make_pair(s, w);
    };
    try {
        enumerate_ball(
            red.basis, radius,
            [&](const std::vector<int64_t>& c, double) {
                auto [s, w] = exact_norm2(c);
                if (s < best) {
                    best = s;
                    best_c = w;
                }
            },
            node_budget);
    } catch (const BudgetExceeded&) {
        throw BudgetExceeded("shortest_vector: enumeration budget exceeded", double(std::sqrt(best)));
    }
    ShortVectorResult out;
    out.value = double(std::sqrt(best));
    out.witness = best_c;
    out.exhaustive_below = radius;
    return out;
}

LatticeBasis lattice_of(const Mat3& g) {
    LatticeBasis b(3, 3);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) b.row(j)[i] = g.m[i][j];
    return b;
}

double systole(const Mat3& g) {
    if (std::abs(g.det() - 1) > 1e-9) throw PreconditionError("systole expects det g = 1");
    return shortest_vector(lattice_of(g)).value;
}

const char* gauge_name(Gauge g) { return g == Gauge::Log ? "log" : "frobenius"; }

double gauge_lower_bound(double frobenius) {
    const double s12 = std::sqrt(12.0);
    const double f = frobenius;
    // every element: exp(X) = I + N gives f <= e^{|X|_F} - 1 and |X|_F <= sqrt(12) eta
    const double any = std::log1p(f) / s12;
    if (f < 1) return any;
    // nilpotent N = X + X^2/2 gives f <= sqrt(12) eta + 6 eta^2; otherwise the gauge is f itself
    const double nil = (-s12 + std::sqrt(12 + 24 * f)) / 12;
    return std::min(std::max(nil, any), f);
}

double certified_gauge_bound(double radius) { return gauge_lower_bound(radius); }

namespace {

// Smallest Frobenius radius whose lower bound reaches eta.
double radius_for_gauge(double eta) {
    double lo = 0, hi = 1;
    while (gauge_lower_bound(hi) < eta) hi *= 2;
    for (int i = 0; i < 100; ++i) {
        double mid = 0.5 * (lo + hi);
        (gauge_lower_bound(mid) < eta ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace

StabilizerSearch::StabilizerSearch(const ExactMat3& n) : n_(n), n_inv_(n.inverse()) {
    for (int k = 0; k < 9; ++k) {
        IntegerMat3 e;
        e.m[k / 3][k % 3] = 1;
        e_[k] = e;
        ExactMat3 ek;
        ek.m[k / 3][k % 3] = 1;
        conj_[k] = n_ * ek * n_inv_;
    }
}

LatticeBasis StabilizerSearch::basis_at(const std::array<double, 3>& y) const {
    LatticeBasis b(9, 9);
    for (int k = 0; k < 9; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) b.row(k)[3 * i + j] = conj_[k].m[i][j].get_d() * std::exp(y[i] - y[j]);
    return b;
}

void StabilizerSearch::apply_transform(const std::vector<int64_t>& t) {
    bool ident = true;
    for (int i = 0; i < 9 && ident; ++i)
        for (int j = 0; j < 9; ++j)
            if (t[size_t(i) * 9 + j] != (i == j ? 1 : 0)) {
                ident = false;
                break;
            }
    if (ident) return;
    std::array<IntegerMat3, 9> e2;
    std::array<ExactMat3, 9> c2;
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) {
            int64_t c = t[size_t(i) * 9 + j];
            if (c == 0) continue;
            ExactInt ci(static_cast<long>(c));
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    if (e_[j].m[a][b] != 0) e2[i].m[a][b] += ci * e_[j].m[a][b];
                    if (conj_[j].m[a][b] != 0) c2[i].m[a][b] += ExactScalar(ci) * conj_[j].m[a][b];
                }
        }
    e_ = std::move(e2);
    conj_ = std::move(c2);
}

void StabilizerSearch::reduce_at(const std::array<double, 3>& y) {
    std::array<double, 3> y0 = warm_ ? last_y_ : std::array<double, 3>{0, 0, 0};
    double span = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) span = std::max(span, std::abs((y[i] - y[j]) - (y0[i] - y0[j])));
    int steps = std::max(1, int(std::ceil(span / 1.0)));
    for (int s = 1; s <= steps; ++s) {
        std::array<double, 3> yy;
        for (int i = 0; i < 3; ++i) yy[i] = y0[i] + (y[i] - y0[i]) * s / steps;
        LllResult r = lll_reduce(basis_at(yy));
        apply_transform(r.transform);
    }
    warm_ = true;
    last_y_ = y;
}

namespace {

using i128 = __int128;

bool fits40(const IntegerMat3& e) {
    for (auto& row : e.m)
        for (auto& x : row)
            if (!(abs(x) < (ExactInt(1) << 40))) return false;
    return true;
}

std::array<i128, 9> to_i128(const IntegerMat3& e) {
    std::array<i128, 9> r{};
    for (int i = 0; i < 9; ++i) r[i] = i128(e.m[i / 3][i % 3].get_si());
    return r;
}

i128 det3(const std::array<i128, 9>& a) {
    return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
           a[2] * (a[3] * a[7] - a[4] * a[6]);
}

// char poly of E is x^3 iff tr E = 0, sum of principal 2-minors = 0, det E = 0
bool nilpotent(const IntegerMat3& e) {
    const auto& m = e.m;
    ExactInt tr = m[0][0] + m[1][1] + m[2][2];
    ExactInt m2 = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0] +
                  m[1][1] * m[2][2] - m[1][2] * m[2][1];
    return tr == 0 && m2 == 0 && e.det() == 0;
}

}  // namespace

InjectivityResult StabilizerSearch::search(const std::array<double, 3>& y, double search_radius,
                                           int64_t node_budget) {
    if (!(search_radius > 0)) throw PreconditionError("search_radius must be positive");
    reduce_at(y);
    LatticeBasis basis = basis_at(y);
    std::array<double, 3> ey{std::exp(y[0]), std::exp(y[1]), std::exp(y[2])};

    std::array<std::array<i128, 9>, 9> e128{};
    bool small = true;
    for (int k = 0; k < 9; ++k) {
        if (!fits40(e_[k])) small = false;
        else e128[k] = to_i128(e_[k]);
    }

    InjectivityResult best;
    best.eta = std::numeric_limits<double>::infinity();
    int64_t rejected = 0;

    auto visit = [&](const std::vector<int64_t>& c, double norm2) {
        if (gauge_lower_bound(std::sqrt(norm2)) >= best.eta) return;
        IntegerMat3 e;
        std::array<i128, 9> ei{};
        bool use128 = small;
        if (use128) {
            for (int k = 0; k < 9; ++k)
                if (c[k] != 0)
                    for (int q = 0; q < 9; ++q) ei[q] += i128(c[k]) * e128[k][q];
            for (int q = 0; q < 9; ++q)
                if (ei[q] >= (i128(1) << 41) || -ei[q] >= (i128(1) << 41)) use128 = false;
        }
        auto build_exact = [&] {
            for (int k = 0; k < 9; ++k)
                if (c[k] != 0) {
                    ExactInt ck(static_cast<long>(c[k]));
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b) e.m[a][b] += ck * e_[k].m[a][b];
                }
        };
        if (!use128) build_exact();
        bool built = !use128;
        for (int sign : {1, -1}) {
            bool ok;
            if (use128) {
                std::array<i128, 9> g = ei;
                for (auto& v : g) v *= sign;
                g[0] += 1;
                g[4] += 1;
                g[8] += 1;
                ok = det3(g) == 1;
            } else {
                IntegerMat3 g = e;
                for (auto& row : g.m)
                    for (auto& v : row) v *= sign;
                for (int i = 0; i < 3; ++i) g.m[i][i] += 1;
                ok = g.det() == 1;
            }
            if (!ok) {
                ++rejected;
                continue;
            }
            if (!built) {
                build_exact();
                built = true;
            }
            IntegerMat3 es = e;
            if (sign < 0)
                for (auto& row : es.m)
                    for (auto& v : row) v = -v;
            ExactMat3 a;
            for (int k = 0; k < 9; ++k)
                if (c[k] != 0) {
                    ExactScalar ck(static_cast<long>(c[k] * sign));
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j)
                            if (conj_[k].m[i][j] != 0) a.m[i][j] += ck * conj_[k].m[i][j];
                }
            auto scaled = [&](const ExactMat3& x) {
                Mat3 r;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) r.m[i][j] = x.m[i][j].get_d() * ey[i] / ey[j];
                return r;
            };
            double value;
            Gauge gauge;
            if (nilpotent(es)) {
                ExactMat3 x = a - ExactScalar(1, 2) * (a * a);
                value = norm(coords_of(scaled(x)));
                gauge = Gauge::Log;
            } else {
                Mat3 nm = scaled(a);
                double f = nm.frobenius();
                if (f < 1) {
                    value = norm(coords_of(log_near_identity(Mat3::identity() + nm)));
                    gauge = Gauge::Log;
                } else {
                    value = f;
                    gauge = Gauge::Frobenius;
                }
            }
            if (value < best.eta) {
                best.eta = value;
                best.gauge = gauge;
                IntegerMat3 w = es;
                for (int i = 0; i < 3; ++i) w.m[i][i] += 1;
                best.witness = w;
            }
        }
    };

    double min_len = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 9; ++k) min_len = std::min(min_len, std::sqrt(basis.norm2(k)));
    double r = std::min(search_radius, min_len * 1.000001);
    for (;;) {
        enumerate_ball(basis, r, visit, node_budget);
        best.searched_radius = r;
        if (std::isfinite(best.eta) && best.eta <= certified_gauge_bound(r)) {
            best.certified = true;
            break;
        }
        if (r >= search_radius) break;
        double next = 2 * r;
        if (std::isfinite(best.eta)) next = std::max(radius_for_gauge(best.eta) * (1 + 1e-9), r * 1.0001);
        r = std::min(search_radius, next);
    }
    best.rejected = rejected;
    if (!std::isfinite(best.eta))
        throw BudgetExceeded("no stabilizer element within search radius; increase search_radius", search_radius);
    return best;
}

InjectivityResult injectivity_radius(const Mat3& g, double search_radius) {
    ExactMat3 n;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) n.m[i][j] = ExactScalar(g.m[i][j]);
    StabilizerSearch s(n);
    return s.search({0, 0, 0}, search_radius);
}

}  // namespace sl3
